//! The `POT_gamma` family of approximate potentials.
//!
//! For a per-resource vector `gamma` with `1 <= gamma_e <= k_e + 1`,
//!
//! ```text
//! Phi_e(P)     = g/(k+1) * (sum_{j in P} w_j)^(k+1) + (1 - g/(k+1)) * sum_{j in P} w_j^(k+1)
//! POT_gamma(s) = sum_e a_e * Phi_e(L_e(s))
//! ```
//!
//! If every local ratio `w_i l_e(P) / (a_e (Phi_e(P) - Phi_e(P \ {i})))` lies
//! in `[lambda, upsilon]`, `POT_gamma` strictly decreases along every
//! `(upsilon / lambda)`-improvement move. [`certify_potential`] measures that
//! range exhaustively and [`rho_bound`] evaluates the worst case over all
//! congestion ratios numerically.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{GameInstance, Resource, State, StateSpace, DEFAULT_STATE_CAP};
use crate::rational::{format_rational, parse_rational, pow, to_f64, Rational};

fn degree_rational(k: u32) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

fn check_gamma(resource: &Resource, gamma: &Rational) -> Result<()> {
    let upper = degree_rational(resource.degree + 1);
    if *gamma < Rational::one() || *gamma > upper {
        return Err(Error::Domain(format!(
            "gamma {} for resource {} outside [1, {}]",
            format_rational(gamma),
            resource.id,
            resource.degree + 1
        )));
    }
    Ok(())
}

/// Per-resource scaling vector parameterizing `POT_gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaProfile {
    gamma: Vec<Rational>,
}

impl GammaProfile {
    pub fn new(instance: &GameInstance, gamma: Vec<Rational>) -> Result<Self> {
        if gamma.len() != instance.num_resources() {
            return Err(Error::InvalidReference(format!(
                "gamma profile has {} entries for {} resources",
                gamma.len(),
                instance.num_resources()
            )));
        }
        for (r, g) in instance.resources().iter().zip(&gamma) {
            check_gamma(r, g)?;
        }
        Ok(Self { gamma })
    }

    /// `gamma_e = 1`: the potential whose worst case is `rho(d) <= d`.
    pub fn all_ones(instance: &GameInstance) -> Self {
        Self {
            gamma: vec![Rational::one(); instance.num_resources()],
        }
    }

    /// `gamma_e = k_e + 1`: the potential coincides with the social cost.
    pub fn social(instance: &GameInstance) -> Self {
        Self {
            gamma: instance
                .resources()
                .iter()
                .map(|r| degree_rational(r.degree + 1))
                .collect(),
        }
    }

    /// `gamma_e = min{k_e + 1, d + delta}` for `delta` in `[0, 1]`.
    pub fn pos(instance: &GameInstance, delta: &Rational) -> Result<Self> {
        check_delta(delta)?;
        let cap = degree_rational(instance.max_degree()) + delta;
        Ok(Self {
            gamma: instance
                .resources()
                .iter()
                .map(|r| degree_rational(r.degree + 1).min(cap.clone()))
                .collect(),
        })
    }

    pub fn from_kind(instance: &GameInstance, kind: &ProfileKind) -> Result<Self> {
        match kind {
            ProfileKind::AllOnes => Ok(Self::all_ones(instance)),
            ProfileKind::Social => Ok(Self::social(instance)),
            ProfileKind::Pos(delta) => Self::pos(instance, delta),
        }
    }

    pub fn gamma(&self) -> &[Rational] {
        &self.gamma
    }

    pub fn max_gamma(&self) -> Rational {
        self.gamma
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rational::one)
    }

    /// Approximation factor the profile is guaranteed to achieve: `d` when
    /// every `gamma_e` is 1 (an upper bound on `rho`), `max{gamma*, d}`
    /// otherwise.
    pub fn guaranteed_factor(&self, instance: &GameInstance) -> Rational {
        let d = degree_rational(instance.max_degree());
        let top = self.max_gamma();
        if top.is_one() {
            d
        } else {
            top.max(d)
        }
    }
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    if *delta < Rational::zero() || *delta > Rational::one() {
        return Err(Error::Domain(format!(
            "delta {} outside [0, 1]",
            format_rational(delta)
        )));
    }
    Ok(())
}

/// Named profiles, as accepted on the command line: `ones`, `social`,
/// `pos:<delta>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileKind {
    AllOnes,
    Social,
    Pos(Rational),
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Domain(format!(
                "unknown gamma profile '{s}' (ones, social, pos:<delta>)"
            ))
        };
        match s.trim() {
            "ones" | "all-ones" => Ok(ProfileKind::AllOnes),
            "social" => Ok(ProfileKind::Social),
            other => {
                let delta = other.strip_prefix("pos:").ok_or_else(bad)?;
                let delta = parse_rational(delta).ok_or_else(bad)?;
                check_delta(&delta)?;
                Ok(ProfileKind::Pos(delta))
            }
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::AllOnes => write!(f, "ones"),
            ProfileKind::Social => write!(f, "social"),
            ProfileKind::Pos(delta) => write!(f, "pos:{}", format_rational(delta)),
        }
    }
}

/// `Phi_e^gamma(P)` for the users with the given weights (without `a_e`).
pub fn resource_potential(
    resource: &Resource,
    gamma: &Rational,
    weights: &[Rational],
) -> Result<Rational> {
    check_gamma(resource, gamma)?;
    Ok(resource_potential_unchecked(
        resource.degree,
        gamma,
        weights,
    ))
}

fn resource_potential_unchecked(degree: u32, gamma: &Rational, weights: &[Rational]) -> Rational {
    if weights.is_empty() {
        return Rational::zero();
    }
    let blend = gamma / degree_rational(degree + 1);
    let total: Rational = weights.iter().sum();
    let individual: Rational = weights.iter().map(|w| pow(w, degree + 1)).sum();
    &blend * pow(&total, degree + 1) + (Rational::one() - blend) * individual
}

fn weights_of(instance: &GameInstance, users: &[usize]) -> Vec<Rational> {
    users.iter().map(|&i| instance.weight(i).clone()).collect()
}

/// `POT_gamma(s)`.
pub fn potential_value(
    instance: &GameInstance,
    profile: &GammaProfile,
    state: &State,
) -> Result<Rational> {
    if profile.gamma.len() != instance.num_resources() {
        return Err(Error::InvalidReference(format!(
            "gamma profile has {} entries for {} resources",
            profile.gamma.len(),
            instance.num_resources()
        )));
    }
    let state = instance.state(state.choices().to_vec())?;
    Ok(potential_unchecked(instance, profile, &state))
}

pub(crate) fn potential_unchecked(
    instance: &GameInstance,
    profile: &GammaProfile,
    state: &State,
) -> Rational {
    let loads = instance.loads(state);
    instance
        .resources()
        .iter()
        .zip(&profile.gamma)
        .zip(&loads.users)
        .filter(|(_, users)| !users.is_empty())
        .map(|((r, g), users)| {
            &r.coefficient * resource_potential_unchecked(r.degree, g, &weights_of(instance, users))
        })
        .sum()
}

/// `(1+x)^h / (b(1+x)^(h+1) + (1-b) - b x^(h+1))` with `b = beta/(h+1)`.
///
/// Always lies in `[1/beta, max{1, h/beta}]`.
pub fn ratio_curve(x: &Rational, h: u32, beta: &Rational) -> Result<Rational> {
    if *x < Rational::zero() {
        return Err(Error::Domain(format!(
            "x = {} is negative",
            format_rational(x)
        )));
    }
    if h < 1 {
        return Err(Error::Domain("h must be at least 1".into()));
    }
    if *beta <= Rational::zero() {
        return Err(Error::Domain(format!(
            "beta = {} must be positive",
            format_rational(beta)
        )));
    }
    let b = beta / degree_rational(h + 1);
    let one_plus = x + Rational::one();
    let numerator = pow(&one_plus, h);
    let denominator = &b * pow(&one_plus, h + 1) + (Rational::one() - &b) - &b * pow(x, h + 1);
    if denominator <= Rational::zero() {
        return Err(Error::Internal(format!(
            "non-positive denominator at x = {}, h = {h}, beta = {}",
            format_rational(x),
            format_rational(beta)
        )));
    }
    Ok(numerator / denominator)
}

/// The local ratio `w_i l_e(P) / (a_e (Phi_e(P) - Phi_e(P \ {i})))`,
/// evaluated both directly and through `mu = (sum_{j != i} w_j) / w_i`;
/// the two forms must agree exactly.
pub fn local_ratio(
    instance: &GameInstance,
    resource_id: usize,
    user_set: &[usize],
    player: usize,
    gamma: &Rational,
) -> Result<Rational> {
    let resource = instance.resource(resource_id)?;
    check_gamma(resource, gamma)?;
    for &p in user_set {
        instance.player(p)?;
    }
    if !user_set.contains(&player) {
        return Err(Error::Precondition(format!(
            "player {player} is not in the user set"
        )));
    }
    let mut users: Vec<usize> = user_set.to_vec();
    users.sort_unstable();
    users.dedup();
    let without: Vec<usize> = users.iter().copied().filter(|&p| p != player).collect();

    let w_i = instance.weight(player);
    let full = resource_potential_unchecked(resource.degree, gamma, &weights_of(instance, &users));
    let reduced =
        resource_potential_unchecked(resource.degree, gamma, &weights_of(instance, &without));
    let marginal = &resource.coefficient * (full - reduced);
    if marginal.is_zero() {
        return Err(Error::Internal(format!(
            "zero potential increment on resource {resource_id} for player {player}"
        )));
    }
    let raw = w_i * instance.latency(resource_id, &users)? / marginal;

    let others: Rational = without.iter().map(|&p| instance.weight(p)).sum();
    let mu = others / w_i;
    let via_mu = ratio_curve(&mu, resource.degree, gamma)?;
    if raw != via_mu {
        return Err(Error::Internal(format!(
            "local ratio forms disagree: {} vs {}",
            format_rational(&raw),
            format_rational(&via_mu)
        )));
    }
    Ok(raw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub resource: usize,
    pub subset: Vec<usize>,
    pub player: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subset: Vec<String> = self.subset.iter().map(usize::to_string).collect();
        write!(
            f,
            "e{}:{{{}}}:p{}",
            self.resource,
            subset.join(" "),
            self.player
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceRatioRange {
    pub min: Rational,
    pub max: Rational,
    pub min_witness: Witness,
    pub max_witness: Witness,
}

/// Observed range of local ratios. By the local-ratio argument the profile
/// is an `implied_factor`-approximate potential on this instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioCertificate {
    /// `None` for resources no examined subset touches.
    pub per_resource: Vec<Option<ResourceRatioRange>>,
    pub lambda: Rational,
    pub upsilon: Rational,
    pub implied_factor: Rational,
    pub triples_checked: usize,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Largest `|P|` examined; `None` means all sizes.
    pub max_subset_size: Option<usize>,
    /// Only examine sets that occur as `L_e(s)` for some state `s`.
    pub reachable_only: bool,
    pub state_cap: usize,
    /// Bound on the number of `(e, P, i)` triples.
    pub triple_cap: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            max_subset_size: None,
            reachable_only: false,
            state_cap: DEFAULT_STATE_CAP,
            triple_cap: 10_000_000,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Exhaustively measures the local-ratio range of `profile` on `instance`.
pub fn certify_potential(
    instance: &GameInstance,
    profile: &GammaProfile,
    options: &CertifyOptions,
) -> Result<RatioCertificate> {
    if profile.gamma.len() != instance.num_resources() {
        return Err(Error::InvalidReference(
            "gamma profile length mismatch".into(),
        ));
    }
    let n = instance.num_players();
    let size_cap = options.max_subset_size.unwrap_or(n).min(n);

    // Candidate user sets per resource, in a deterministic order.
    let candidates: Vec<Vec<Vec<usize>>> = if options.reachable_only {
        let space = StateSpace::new(instance, options.state_cap)?;
        let mut seen = vec![BTreeSet::new(); instance.num_resources()];
        for state in space.iter() {
            for (e, users) in instance.loads(&state).users.into_iter().enumerate() {
                if !users.is_empty() && users.len() <= size_cap {
                    seen[e].insert(users);
                }
            }
        }
        let sets: Vec<Vec<Vec<usize>>> =
            seen.into_iter().map(|s| s.into_iter().collect()).collect();
        let triples: usize = sets.iter().flatten().map(Vec::len).sum();
        if triples > options.triple_cap {
            return Err(Error::capacity(
                "local-ratio triples",
                triples,
                options.triple_cap,
            ));
        }
        sets
    } else {
        let per_resource: u128 = (1..=size_cap)
            .map(|s| binomial(n, s).saturating_mul(s as u128))
            .fold(0u128, u128::saturating_add);
        let triples = per_resource.saturating_mul(instance.num_resources() as u128);
        if n >= 64 || triples > options.triple_cap as u128 {
            return Err(Error::capacity(
                "local-ratio triples",
                triples,
                options.triple_cap,
            ));
        }
        let subsets: Vec<Vec<usize>> = (1u64..(1u64 << n))
            .filter(|mask| (mask.count_ones() as usize) <= size_cap)
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
            .collect();
        vec![subsets; instance.num_resources()]
    };

    let mut per_resource = Vec::with_capacity(instance.num_resources());
    let mut triples_checked = 0;
    for (e, sets) in candidates.iter().enumerate() {
        let gamma = &profile.gamma[e];
        let mut range: Option<ResourceRatioRange> = None;
        for subset in sets {
            for &player in subset {
                let value = local_ratio(instance, e, subset, player, gamma)?;
                triples_checked += 1;
                let witness = || Witness {
                    resource: e,
                    subset: subset.clone(),
                    player,
                };
                match range.as_mut() {
                    None => {
                        range = Some(ResourceRatioRange {
                            min: value.clone(),
                            max: value,
                            min_witness: witness(),
                            max_witness: witness(),
                        })
                    }
                    Some(r) => {
                        if value < r.min {
                            r.min = value.clone();
                            r.min_witness = witness();
                        }
                        if value > r.max {
                            r.max = value;
                            r.max_witness = witness();
                        }
                    }
                }
            }
        }
        per_resource.push(range);
    }

    let lambda = per_resource
        .iter()
        .flatten()
        .map(|r| r.min.clone())
        .min()
        .unwrap_or_else(Rational::one);
    let upsilon = per_resource
        .iter()
        .flatten()
        .map(|r| r.max.clone())
        .max()
        .unwrap_or_else(Rational::one);
    let implied_factor = &upsilon / &lambda;
    Ok(RatioCertificate {
        per_resource,
        lambda,
        upsilon,
        implied_factor,
        triples_checked,
    })
}

/// Numerically computed worst-case local ratio of the all-ones profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoResult {
    pub degree: u32,
    pub rho: f64,
    pub argmax_x: f64,
    /// Degree `k <= d` at which the maximum was attained.
    pub argmax_degree: u32,
    pub tolerance: f64,
    /// Whether the bracketing grid looked unimodal for every degree. When
    /// it did not, `rho` is the grid maximum and `tolerance` is widened.
    pub unimodal: bool,
}

/// Ratio for a single degree in floating point, evaluated through the
/// binomial expansion of numerator and denominator to avoid the
/// cancellation in `(1+x)^(h+1) - x^(h+1)`.
pub fn ratio_f64(x: f64, h: u32, beta: f64) -> f64 {
    let mut numerator = 1.0;
    let mut denominator = 1.0;
    let mut binom = 1.0;
    let mut power = 1.0;
    for t in 1..=h {
        binom = binom * f64::from(h + 1 - t) / f64::from(t);
        power *= x;
        numerator += binom * power;
        denominator += beta / f64::from(h + 1 - t) * binom * power;
    }
    numerator / denominator
}

const GRID_START: f64 = 1e-3;
const GRID_END: f64 = 1e6;
const GOLDEN_BUDGET: usize = 500;

struct PeakSearch {
    value: f64,
    x: f64,
    unimodal: bool,
    slack: f64,
}

fn search_peak(h: u32, lower: f64, tol: f64) -> Result<PeakSearch> {
    let f = |x: f64| ratio_f64(x, h, 1.0);
    let mut grid = vec![lower];
    let mut step = GRID_START;
    while step <= GRID_END {
        grid.push(lower + step);
        step *= 2.0;
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite ratio on grid for k = {h}"
        )));
    }
    let peak = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });

    let eps = 1e-14;
    let rising = values[..=peak].windows(2).all(|w| w[1] >= w[0] - eps);
    let falling = values[peak..].windows(2).all(|w| w[1] <= w[0] + eps);
    if !(rising && falling) {
        let slack = values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        return Ok(PeakSearch {
            value: values[peak],
            x: grid[peak],
            unimodal: false,
            slack,
        });
    }

    let mut a = grid[peak.saturating_sub(1)];
    let mut b = grid[(peak + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let width_goal = (tol * 1e-3).max(1e-13);
    let mut iterations = 0;
    while (b - a) > width_goal * (1.0 + a.abs()) {
        iterations += 1;
        if iterations > GOLDEN_BUDGET {
            return Err(Error::Numeric(format!(
                "golden-section search for k = {h} did not converge"
            )));
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    let mut best = (f(x), x);
    for candidate in [a, b, grid[peak]] {
        let v = f(candidate);
        if v > best.0 {
            best = (v, candidate);
        }
    }
    Ok(PeakSearch {
        value: best.0,
        x: best.1,
        unimodal: true,
        slack: 0.0,
    })
}

fn rho_over_degrees(d: u32, tol: f64, lower: impl Fn(u32) -> f64) -> Result<RhoResult> {
    if d < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let mut result = RhoResult {
        degree: d,
        rho: f64::NEG_INFINITY,
        argmax_x: 0.0,
        argmax_degree: 1,
        tolerance: tol,
        unimodal: true,
    };
    for k in 1..=d {
        let peak = search_peak(k, lower(k), tol)?;
        result.unimodal &= peak.unimodal;
        result.tolerance = result.tolerance.max(peak.slack);
        if peak.value > result.rho {
            result.rho = peak.value;
            result.argmax_x = peak.x;
            result.argmax_degree = k;
        }
    }
    Ok(result)
}

/// `sup_{x >= 0}` of the all-ones local ratio, maximised over degrees
/// `1..=d`.
pub fn rho_bound(d: u32, tol: f64) -> Result<RhoResult> {
    rho_over_degrees(d, tol, |_| 0.0)
}

/// Same supremum restricted to `x >= tau * k`, the range reachable in a
/// `tau`-congested game. Bounded by `exp(1/tau)`.
pub fn rho_bound_tau(d: u32, tau: &Rational, tol: f64) -> Result<RhoResult> {
    if *tau <= Rational::zero() {
        return Err(Error::Domain(format!(
            "tau = {} must be positive",
            format_rational(tau)
        )));
    }
    let tau = to_f64(tau);
    rho_over_degrees(d, tol, |k| tau * f64::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn resource(degree: u32) -> Resource {
        Resource {
            id: 0,
            coefficient: int(1),
            degree,
        }
    }

    /// Direct transcription of the definition, used as an independent check.
    fn phi_direct(k: u32, gamma: &Rational, weights: &[i64]) -> Rational {
        let total: i64 = weights.iter().sum();
        let kk = int(i64::from(k) + 1);
        gamma / &kk * pow(&int(total), k + 1)
            + (int(1) - gamma / &kk)
                * weights
                    .iter()
                    .map(|&w| pow(&int(w), k + 1))
                    .sum::<Rational>()
    }

    #[test]
    fn resource_potential_examples() {
        let w = |ws: &[i64]| ws.iter().map(|&x| int(x)).collect::<Vec<_>>();
        assert_eq!(
            resource_potential(&resource(1), &int(1), &w(&[1, 2])).unwrap(),
            int(7)
        );
        assert_eq!(phi_direct(1, &int(1), &[1, 2]), int(7));
        // Rosenthal: sum_{j=1}^{3} j for unit weights, linear latency.
        assert_eq!(
            resource_potential(&resource(1), &int(1), &w(&[1, 1, 1])).unwrap(),
            int(6)
        );
        assert_eq!(
            resource_potential(&resource(3), &int(2), &[]).unwrap(),
            int(0)
        );
        for k in 1..=4u32 {
            for g in [int(1), ratio(3, 2), int(i64::from(k) + 1)] {
                assert_eq!(
                    resource_potential(&resource(k), &g, &[ratio(5, 3)]).unwrap(),
                    pow(&ratio(5, 3), k + 1)
                );
            }
        }
        assert!(resource_potential(&resource(2), &int(4), &w(&[1])).is_err());
        assert!(resource_potential(&resource(2), &ratio(1, 2), &w(&[1])).is_err());
    }

    #[test]
    fn ratio_curve_examples() {
        for h in 1..=5 {
            for beta in [ratio(1, 2), int(1), int(3)] {
                assert_eq!(ratio_curve(&int(0), h, &beta).unwrap(), int(1));
            }
        }
        for x in [int(0), ratio(1, 3), int(7)] {
            assert_eq!(ratio_curve(&x, 1, &int(1)).unwrap(), int(1));
        }
        assert_eq!(ratio_curve(&int(1), 2, &int(1)).unwrap(), ratio(4, 3));
        assert!(matches!(
            ratio_curve(&int(-1), 2, &int(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn local_ratio_examples() {
        let g = GameInstance::new(
            vec![int(1), int(1), int(2)],
            vec![(int(1), 1), (int(3), 2)],
            vec![vec![vec![0, 1]]; 3],
        )
        .unwrap();
        assert_eq!(local_ratio(&g, 0, &[0, 1, 2], 2, &int(1)).unwrap(), int(1));
        assert_eq!(
            local_ratio(&g, 1, &[0, 1], 0, &int(1)).unwrap(),
            ratio(4, 3)
        );
        assert_eq!(local_ratio(&g, 1, &[0], 0, &int(1)).unwrap(), int(1));
        assert!(matches!(
            local_ratio(&g, 1, &[0, 1], 2, &int(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn potential_value_examples() {
        let g = GameInstance::new(vec![int(2)], vec![(int(1), 2)], vec![vec![vec![0]]]).unwrap();
        let s = g.state(vec![0]).unwrap();
        assert_eq!(
            potential_value(&g, &GammaProfile::all_ones(&g), &s).unwrap(),
            int(8)
        );

        let g = GameInstance::new(
            vec![int(1), int(2)],
            vec![(int(1), 1)],
            vec![vec![vec![0]]; 2],
        )
        .unwrap();
        let s = g.state(vec![0, 0]).unwrap();
        assert_eq!(
            potential_value(&g, &GammaProfile::all_ones(&g), &s).unwrap(),
            int(7)
        );
        assert_eq!(
            potential_value(&g, &GammaProfile::social(&g), &s).unwrap(),
            g.social_cost(&s).unwrap()
        );
        let short = GammaProfile { gamma: vec![] };
        assert!(matches!(
            potential_value(&g, &short, &s),
            Err(Error::InvalidReference(_))
        ));
    }

    #[test]
    fn profiles() {
        let g = GameInstance::new(
            vec![int(1)],
            vec![(int(1), 1), (int(1), 3)],
            vec![vec![vec![0], vec![1]]],
        )
        .unwrap();
        assert_eq!(GammaProfile::social(&g).gamma(), &[int(2), int(4)]);
        assert_eq!(
            GammaProfile::pos(&g, &ratio(1, 2)).unwrap().gamma(),
            &[int(2), ratio(7, 2)]
        );
        assert_eq!(
            GammaProfile::pos(&g, &int(1)).unwrap(),
            GammaProfile::social(&g)
        );
        assert!(GammaProfile::pos(&g, &ratio(3, 2)).is_err());
        assert!(GammaProfile::new(&g, vec![int(3), int(1)]).is_err());
        assert_eq!(GammaProfile::all_ones(&g).guaranteed_factor(&g), int(3));
        assert_eq!(GammaProfile::social(&g).guaranteed_factor(&g), int(4));
        assert_eq!(
            "pos:1/2".parse::<ProfileKind>().unwrap(),
            ProfileKind::Pos(ratio(1, 2))
        );
        assert!("pos:2".parse::<ProfileKind>().is_err());
        assert!("nope".parse::<ProfileKind>().is_err());
    }

    #[test]
    fn certificate_on_linear_game_is_exact() {
        let g = GameInstance::new(
            vec![int(1), ratio(5, 2), int(3)],
            vec![(int(1), 1), (ratio(1, 2), 1)],
            vec![vec![vec![0], vec![1]]; 3],
        )
        .unwrap();
        let cert =
            certify_potential(&g, &GammaProfile::all_ones(&g), &CertifyOptions::default()).unwrap();
        assert_eq!(cert.implied_factor, int(1));
        assert_eq!(cert.triples_checked, 2 * 12);
    }

    #[test]
    fn certificate_capacity() {
        let g =
            GameInstance::new(vec![int(1); 3], vec![(int(1), 2)], vec![vec![vec![0]]; 3]).unwrap();
        let options = CertifyOptions {
            triple_cap: 5,
            ..Default::default()
        };
        assert!(matches!(
            certify_potential(&g, &GammaProfile::all_ones(&g), &options),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn float_ratio_matches_exact() {
        for h in 1..=6 {
            for (num, den) in [(0, 1), (1, 3), (1, 1), (17, 4)] {
                for beta in [int(1), ratio(3, 2)] {
                    let exact = ratio_curve(&ratio(num, den), h, &beta).unwrap();
                    let float = ratio_f64(num as f64 / den as f64, h, to_f64(&beta));
                    assert!((to_f64(&exact) - float).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rho_small_degrees() {
        let r = rho_bound(1, 1e-9).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-9);
        let r = rho_bound(2, 1e-9).unwrap();
        assert!((r.rho - 4.0 / 3.0).abs() < 1e-9);
        assert!((r.argmax_x - 1.0).abs() < 1e-3);
        assert!(r.unimodal);
        assert!(rho_bound(0, 1e-9).is_err());
        assert!(rho_bound(2, 0.0).is_err());
    }

    #[test]
    fn rho_tau_examples() {
        let r = rho_bound_tau(1, &int(1), 1e-9).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-9);
        let r = rho_bound_tau(3, &int(1), 1e-9).unwrap();
        assert!(r.rho <= std::f64::consts::E);
        let r = rho_bound_tau(4, &int(100), 1e-9).unwrap();
        assert!(r.rho <= 0.01f64.exp());
        assert!(rho_bound_tau(2, &int(0), 1e-9).is_err());
    }
}
