//! Reproducible checks behind the `wcg` subcommands.
//!
//! Every command produces [`ResultRow`]s rendered as CSV with an exact
//! `num/den` column beside the float column.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::dynamics::{converge_from_optimum, PosRun, Scheduler};
use crate::error::{Error, Result};
use crate::game::{GameInstance, State};
use crate::instance::{generate_random, RandomGameParams};
use crate::oracle::{self, PosValue, PotentialCheck};
use crate::potential::{
    certify_potential, rho_bound, CertifyOptions, GammaProfile, ProfileKind, RhoResult,
};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

pub const CSV_HEADER: &str = "instance,d,param,metric,exact,float,witness";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub d: u32,
    /// α, δ or `-`.
    pub param: String,
    pub metric: String,
    pub exact: Option<Rational>,
    pub float: f64,
    pub witness: String,
}

impl ResultRow {
    fn exact(instance: &str, d: u32, param: &str, metric: &str, value: &Rational) -> Self {
        Self {
            instance: instance.to_string(),
            d,
            param: param.to_string(),
            metric: metric.to_string(),
            exact: Some(value.clone()),
            float: to_f64(value),
            witness: String::new(),
        }
    }

    fn flag(instance: &str, d: u32, param: &str, metric: &str, on: bool) -> Self {
        let value = Rational::from_integer(BigInt::from(on as u8));
        Self::exact(instance, d, param, metric, &value)
    }

    fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = witness.into();
        self
    }

    fn fields(&self) -> [String; 7] {
        let exact = self.exact.as_ref().map(format_rational).unwrap_or_default();
        let float = if self.float.is_finite() {
            format!("{}", self.float)
        } else {
            String::new()
        };
        [
            self.instance.clone(),
            self.d.to_string(),
            self.param.clone(),
            self.metric.clone(),
            exact,
            float,
            self.witness.clone(),
        ]
    }

    /// One CSV record, without the line terminator.
    pub fn to_csv(&self) -> String {
        let mut text = write_records(std::iter::once(self.fields()));
        text.pop();
        text
    }
}

fn write_records<I, R>(records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        // Writing to a Vec cannot fail.
        writer.write_record(record).expect("in-memory csv write");
    }
    let bytes = writer.into_inner().expect("in-memory csv flush");
    String::from_utf8(bytes).expect("csv fields are utf-8")
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let header = CSV_HEADER
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    write_records(std::iter::once(header).chain(rows.iter().map(|r| r.fields().to_vec())))
}

fn states_witness(states: &[State]) -> String {
    states
        .iter()
        .map(|s| {
            s.choices()
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect::<Vec<_>>()
        .join(">")
}

#[derive(Debug, Clone)]
pub struct RhoRow {
    pub degree: u32,
    pub outcome: std::result::Result<RhoResult, Error>,
}

impl RhoRow {
    /// `rho(d) <= d` up to the search tolerance.
    pub fn within_bound(&self) -> bool {
        self.outcome
            .as_ref()
            .is_ok_and(|r| r.rho <= f64::from(self.degree) + r.tolerance)
    }
}

#[derive(Debug, Clone)]
pub struct RhoTable {
    pub rows: Vec<RhoRow>,
}

impl RhoTable {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(RhoRow::within_bound)
    }

    pub fn result_rows(&self) -> Vec<ResultRow> {
        self.rows
            .iter()
            .map(|row| match &row.outcome {
                Ok(r) => ResultRow {
                    instance: "-".into(),
                    d: row.degree,
                    param: "-".into(),
                    metric: "rho".into(),
                    exact: None,
                    float: r.rho,
                    witness: format!("x={};k={};tol={}", r.argmax_x, r.argmax_degree, r.tolerance),
                },
                Err(e) => ResultRow {
                    instance: "-".into(),
                    d: row.degree,
                    param: "-".into(),
                    metric: "rho".into(),
                    exact: None,
                    float: f64::NAN,
                    witness: format!("error: {e}"),
                },
            })
            .collect()
    }
}

/// `rho(d)` for `d = 1..=d_max`.
pub fn cmd_rho(d_max: u32, tol: f64) -> Result<RhoTable> {
    if d_max < 1 {
        return Err(Error::Domain("d_max must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let rows = (1..=d_max)
        .into_par_iter()
        .map(|degree| RhoRow {
            degree,
            outcome: rho_bound(degree, tol),
        })
        .collect();
    Ok(RhoTable { rows })
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub instance: String,
    pub d: u32,
    pub profile: ProfileKind,
    pub alpha: Rational,
    pub check: PotentialCheck,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.check.passed()
    }

    pub fn result_rows(&self) -> Vec<ResultRow> {
        let param = format_rational(&self.alpha);
        let tag = format!("profile={}", self.profile);
        match &self.check {
            PotentialCheck::Pass { edges_checked } => vec![
                ResultRow::flag(&self.instance, self.d, &param, "potential_pass", true)
                    .with_witness(tag.clone()),
                ResultRow::exact(
                    &self.instance,
                    self.d,
                    &param,
                    "edges_checked",
                    &Rational::from_integer(BigInt::from(*edges_checked)),
                )
                .with_witness(tag),
            ],
            PotentialCheck::Violation(v) => vec![
                ResultRow::flag(&self.instance, self.d, &param, "potential_pass", false)
                    .with_witness(format!("{tag};edge={v}")),
                ResultRow::exact(
                    &self.instance,
                    self.d,
                    &param,
                    "violation_factor",
                    &v.factor,
                )
                .with_witness(v.to_string()),
            ],
        }
    }
}

/// Checks the named profile is an α-approximate potential on `instance`.
pub fn cmd_verify(
    instance: &GameInstance,
    id: &str,
    profile: &ProfileKind,
    alpha: &Rational,
    cap: usize,
) -> Result<VerifyReport> {
    let gamma = GammaProfile::from_kind(instance, profile)?;
    let check = oracle::verify_potential_on_graph(instance, &gamma, alpha, cap)?;
    Ok(VerifyReport {
        instance: id.to_string(),
        d: instance.max_degree(),
        profile: profile.clone(),
        alpha: alpha.clone(),
        check,
    })
}

#[derive(Debug, Clone)]
pub struct PosReport {
    pub instance: String,
    pub d: u32,
    pub run: PosRun,
    pub exact_pos: PosValue,
}

impl PosReport {
    /// Both the dynamics ratio and the oracle's exact PoS are within
    /// `(d+1)/(d+delta)`.
    pub fn within_bound(&self) -> bool {
        self.run.ratio <= self.run.bound
            && self.exact_pos.value().is_some_and(|v| *v <= self.run.bound)
    }

    pub fn result_rows(&self) -> Vec<ResultRow> {
        let param = format_rational(&self.run.delta);
        let row = |metric: &str, value: &Rational| {
            ResultRow::exact(&self.instance, self.d, &param, metric, value)
        };
        let mut rows = vec![
            row("optimum_cost", &self.run.optimum_cost)
                .with_witness(states_witness(std::slice::from_ref(&self.run.optimum))),
            row("terminal_cost", &self.run.terminal_cost).with_witness(states_witness(
                std::slice::from_ref(&self.run.trace.terminal),
            )),
            row("ratio", &self.run.ratio)
                .with_witness(format!("steps={}", self.run.trace.steps_taken)),
            row("bound", &self.run.bound),
        ];
        match &self.exact_pos {
            PosValue::Defined(v) => rows.push(row("exact_pos", v)),
            PosValue::Undefined => rows.push(ResultRow {
                exact: None,
                float: f64::NAN,
                witness: "undefined".into(),
                ..row("exact_pos", &self.run.bound)
            }),
        }
        rows
    }
}

/// `(d + delta)`-improvement dynamics from a social optimum, compared with
/// `(d+1)/(d+delta)` and with the exact `(d+delta)`-PoS.
pub fn cmd_pos(
    instance: &GameInstance,
    id: &str,
    delta: &Rational,
    scheduler: &Scheduler,
    cap: usize,
) -> Result<PosReport> {
    let run = converge_from_optimum(instance, delta, scheduler, cap)?;
    let exact_pos = oracle::exact_pos(instance, &run.alpha, cap)?;
    Ok(PosReport {
        instance: id.to_string(),
        d: instance.max_degree(),
        run,
        exact_pos,
    })
}

/// An α value, either absolute or relative to the instance degree (`d`,
/// `d+1/2`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaSpec {
    Absolute(Rational),
    DegreePlus(Rational),
}

impl AlphaSpec {
    pub fn resolve(&self, d: u32) -> Rational {
        match self {
            AlphaSpec::Absolute(a) => a.clone(),
            AlphaSpec::DegreePlus(offset) => Rational::from_integer(BigInt::from(d)) + offset,
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("bad alpha '{s}' (e.g. 3/2, d, d+1/2)"));
        if let Some(rest) = s.strip_prefix('d') {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(AlphaSpec::DegreePlus(Rational::from_integer(0.into())));
            }
            let offset = rest
                .strip_prefix('+')
                .and_then(parse_rational)
                .ok_or_else(bad)?;
            return Ok(AlphaSpec::DegreePlus(offset));
        }
        parse_rational(s).map(AlphaSpec::Absolute).ok_or_else(bad)
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Absolute(a) => write!(f, "{}", format_rational(a)),
            AlphaSpec::DegreePlus(o) if *o == Rational::from_integer(0.into()) => write!(f, "d"),
            AlphaSpec::DegreePlus(o) => write!(f, "d+{}", format_rational(o)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Generator parameters; trial `t` uses seed `base.seed + t`.
    pub base: RandomGameParams,
    pub trials: usize,
    pub alpha_grid: Vec<AlphaSpec>,
    pub state_cap: usize,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<ResultRow>,
    /// Cycles found at some α >= d, which would contradict convergence of
    /// d-improvement dynamics.
    pub guaranteed_violations: usize,
}

struct TrialOutcome {
    rows: Vec<ResultRow>,
    violations: usize,
}

fn sweep_trial(spec: &SweepSpec, trial: usize) -> Result<TrialOutcome> {
    let seed = spec.base.seed.wrapping_add(trial as u64);
    let instance = generate_random(&RandomGameParams {
        seed,
        ..spec.base.clone()
    })?;
    let id = format!("trial{trial}-seed{seed}");
    let d = instance.max_degree();
    let certificate = certify_potential(
        &instance,
        &GammaProfile::all_ones(&instance),
        &CertifyOptions {
            state_cap: spec.state_cap,
            ..Default::default()
        },
    )?;
    let mut rows = vec![ResultRow::exact(
        &id,
        d,
        "-",
        "certificate_factor",
        &certificate.implied_factor,
    )];
    let alphas: Vec<Rational> = spec.alpha_grid.iter().map(|a| a.resolve(d)).collect();
    let report = oracle::analyze(&instance, &alphas, spec.state_cap)?;
    let d_rational = Rational::from_integer(BigInt::from(d));
    let mut violations = 0;
    for alpha in &alphas {
        let param = format_rational(alpha);
        let equilibria = &report.equilibria[alpha];
        let cycle = &report.cycles[alpha];
        rows.push(ResultRow::exact(
            &id,
            d,
            &param,
            "equilibrium_count",
            &Rational::from_integer(BigInt::from(equilibria.len())),
        ));
        rows.push(ResultRow::flag(
            &id,
            d,
            &param,
            "equilibrium_exists",
            !equilibria.is_empty(),
        ));
        rows.push(
            ResultRow::flag(&id, d, &param, "cycle_witness", cycle.is_some())
                .with_witness(cycle.as_deref().map(states_witness).unwrap_or_default()),
        );
        if let PosValue::Defined(v) = &report.exact_pos[alpha] {
            rows.push(ResultRow::exact(&id, d, &param, "exact_pos", v));
        }
        if cycle.is_some() && *alpha >= d_rational {
            violations += 1;
        }
    }
    Ok(TrialOutcome { rows, violations })
}

/// Random-instance sweep over an α grid. Trials run in parallel; rows come
/// out in trial order.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    let outcomes = (0..spec.trials)
        .into_par_iter()
        .map(|t| sweep_trial(spec, t))
        .collect::<Result<Vec<_>>>()?;
    let mut report = SweepReport {
        rows: Vec::new(),
        guaranteed_violations: 0,
    };
    for outcome in outcomes {
        report.rows.extend(outcome.rows);
        report.guaranteed_violations += outcome.violations;
    }
    Ok(report)
}
