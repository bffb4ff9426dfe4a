//! α-improvement dynamics.
//!
//! A move of player `i` from `s` to `[s_{-i}, s']` is an α-improvement move
//! when `α · c_i([s_{-i}, s']) < c_i(s)`; the comparison is exact and strict,
//! so a move improving by exactly `α` does not count.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameInstance, State, DEFAULT_STATE_CAP};
use crate::oracle;
use crate::potential::{check_delta, potential_unchecked, GammaProfile};
use crate::rational::{format_rational, Rational};

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub old_cost: Rational,
    pub new_cost: Rational,
    /// `old_cost / new_cost`.
    pub improvement_factor: Rational,
}

pub(crate) fn check_alpha(alpha: &Rational) -> Result<()> {
    if *alpha < Rational::one() {
        return Err(Error::Domain(format!(
            "alpha = {} must be at least 1",
            format_rational(alpha)
        )));
    }
    Ok(())
}

/// All strictly α-improving unilateral deviations, ordered by player and
/// then by target strategy index.
pub fn improving_moves(
    instance: &GameInstance,
    state: &State,
    alpha: &Rational,
) -> Result<Vec<Move>> {
    check_alpha(alpha)?;
    let state = instance.state(state.choices().to_vec())?;
    Ok(improving_moves_unchecked(instance, &state, alpha))
}

pub(crate) fn improving_moves_unchecked(
    instance: &GameInstance,
    state: &State,
    alpha: &Rational,
) -> Vec<Move> {
    let loads = instance.loads(state);
    let mut moves = Vec::new();
    for player in 0..instance.num_players() {
        let from = state.choice(player);
        let old_cost = instance.cost_under(&loads, state, player);
        for to in 0..instance.strategies(player).len() {
            if to == from {
                continue;
            }
            let new_cost = instance.deviation_cost(&loads, state, player, to);
            if alpha * &new_cost < old_cost {
                moves.push(Move {
                    player,
                    from,
                    to,
                    improvement_factor: &old_cost / &new_cost,
                    old_cost: old_cost.clone(),
                    new_cost,
                });
            }
        }
    }
    moves
}

/// `true` iff no player has an α-improvement move.
pub fn is_equilibrium(instance: &GameInstance, state: &State, alpha: &Rational) -> Result<bool> {
    Ok(improving_moves(instance, state, alpha)?.is_empty())
}

/// Which α-improvement move to apply next.
///
/// Ties are broken towards the lowest player id and then the lowest
/// strategy index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheduler {
    /// Lowest-id player with an improving move plays its cheapest deviation.
    BestResponse,
    /// The move with the largest improvement factor.
    MaxGain,
    /// Players are polled cyclically, starting after the previous mover;
    /// the first one with an improving move plays its cheapest deviation.
    RoundRobin,
    /// Uniform over all improving moves, driven by a seeded ChaCha stream.
    Random { seed: u64 },
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "best-response" | "br" => Ok(Scheduler::BestResponse),
            "max-gain" => Ok(Scheduler::MaxGain),
            "round-robin" | "rr" => Ok(Scheduler::RoundRobin),
            other => other
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(|seed| Scheduler::Random { seed })
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "unknown scheduler '{other}' (best-response, max-gain, round-robin, random:<seed>)"
                    ))
                }),
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::BestResponse => write!(f, "best-response"),
            Scheduler::MaxGain => write!(f, "max-gain"),
            Scheduler::RoundRobin => write!(f, "round-robin"),
            Scheduler::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

enum Picker {
    BestResponse,
    MaxGain,
    RoundRobin { cursor: usize },
    Random(Box<ChaCha8Rng>),
}

fn cheapest(moves: &[Move], player: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in moves.iter().enumerate().filter(|(_, m)| m.player == player) {
        if best.is_none_or(|b| m.new_cost < moves[b].new_cost) {
            best = Some(i);
        }
    }
    best
}

impl Picker {
    fn new(scheduler: &Scheduler) -> Self {
        match scheduler {
            Scheduler::BestResponse => Picker::BestResponse,
            Scheduler::MaxGain => Picker::MaxGain,
            Scheduler::RoundRobin => Picker::RoundRobin { cursor: 0 },
            Scheduler::Random { seed } => {
                Picker::Random(Box::new(ChaCha8Rng::seed_from_u64(*seed)))
            }
        }
    }

    /// Scheduler-internal state that, together with the game state,
    /// determines every future choice. `None` for the random scheduler.
    fn memory(&self) -> Option<usize> {
        match self {
            Picker::BestResponse | Picker::MaxGain => Some(0),
            Picker::RoundRobin { cursor } => Some(*cursor),
            Picker::Random(_) => None,
        }
    }

    fn pick(&mut self, moves: &[Move], players: usize) -> usize {
        match self {
            Picker::BestResponse => cheapest(moves, moves[0].player).unwrap_or(0),
            Picker::MaxGain => {
                let mut best = 0;
                for (i, m) in moves.iter().enumerate().skip(1) {
                    if m.improvement_factor > moves[best].improvement_factor {
                        best = i;
                    }
                }
                best
            }
            Picker::RoundRobin { cursor } => {
                for offset in 0..players {
                    let player = (*cursor + offset) % players;
                    if let Some(i) = cheapest(moves, player) {
                        *cursor = (player + 1) % players;
                        return i;
                    }
                }
                0
            }
            Picker::Random(rng) => rng.random_range(0..moves.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub mv: Move,
    pub potential_after: Option<Rational>,
    pub social_cost_after: Rational,
}

/// A state visited twice during a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatWitness {
    pub state: State,
    /// Steps taken when the state was first reached.
    pub first_visit: usize,
    pub revisit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveTrace {
    pub alpha: Rational,
    pub initial_state: State,
    pub initial_social_cost: Rational,
    pub initial_potential: Option<Rational>,
    pub steps: Vec<TraceStep>,
    pub terminal: State,
    pub converged: bool,
    pub steps_taken: usize,
    /// First repeated state, if any. Deterministic schedulers stop at the
    /// first repeat of (state, scheduler memory) since the run is periodic
    /// from there on.
    pub repeat: Option<RepeatWitness>,
}

impl MoveTrace {
    pub fn terminal_social_cost(&self) -> &Rational {
        self.steps
            .last()
            .map_or(&self.initial_social_cost, |s| &s.social_cost_after)
    }
}

/// Applies scheduler-chosen α-improvement moves until none remains or
/// `max_steps` moves have been made.
///
/// With a `profile` attached, the potential is recorded after each step.
/// When `alpha` is at least the profile's guaranteed factor the potential
/// must drop strictly on every step; a non-decrease is reported as
/// [`Error::InvariantViolation`].
pub fn run_dynamics(
    instance: &GameInstance,
    start: &State,
    alpha: &Rational,
    scheduler: &Scheduler,
    max_steps: usize,
    profile: Option<&GammaProfile>,
) -> Result<MoveTrace> {
    check_alpha(alpha)?;
    if max_steps == 0 {
        return Err(Error::Domain("max_steps must be positive".into()));
    }
    let start = instance.state(start.choices().to_vec())?;
    if let Some(p) = profile {
        GammaProfile::new(instance, p.gamma().to_vec())?;
    }
    let enforce = profile.is_some_and(|p| *alpha >= p.guaranteed_factor(instance));

    let mut picker = Picker::new(scheduler);
    let mut state = start.clone();
    let mut potential = profile.map(|p| potential_unchecked(instance, p, &state));
    let mut trace = MoveTrace {
        alpha: alpha.clone(),
        initial_state: start.clone(),
        initial_social_cost: instance.social_cost(&start)?,
        initial_potential: potential.clone(),
        steps: Vec::new(),
        terminal: start.clone(),
        converged: false,
        steps_taken: 0,
        repeat: None,
    };
    let mut visited: HashMap<(State, Option<usize>), usize> = HashMap::new();
    visited.insert((state.clone(), picker.memory()), 0);

    loop {
        let moves = improving_moves_unchecked(instance, &state, alpha);
        if moves.is_empty() {
            trace.converged = true;
            break;
        }
        if trace.steps_taken == max_steps {
            break;
        }
        let chosen = moves[picker.pick(&moves, instance.num_players())].clone();
        state = state.with_choice(chosen.player, chosen.to);
        trace.steps_taken += 1;

        let next_potential = profile.map(|p| potential_unchecked(instance, p, &state));
        if enforce {
            if let (Some(before), Some(after)) = (&potential, &next_potential) {
                if after >= before {
                    return Err(Error::InvariantViolation(format!(
                        "potential did not decrease at step {} (player {} strategy {} -> {}): {} -> {}",
                        trace.steps_taken,
                        chosen.player,
                        chosen.from,
                        chosen.to,
                        format_rational(before),
                        format_rational(after)
                    )));
                }
            }
        }
        potential = next_potential.clone();
        trace.steps.push(TraceStep {
            mv: chosen,
            potential_after: next_potential,
            social_cost_after: instance.social_cost_by_resources(&state),
        });

        let key = (state.clone(), picker.memory());
        if let Some(&first) = visited.get(&key) {
            if trace.repeat.is_none() {
                trace.repeat = Some(RepeatWitness {
                    state: state.clone(),
                    first_visit: first,
                    revisit: trace.steps_taken,
                });
            }
            if key.1.is_some() {
                break;
            }
        } else {
            visited.insert(key, trace.steps_taken);
        }
    }
    trace.terminal = state;
    Ok(trace)
}

/// Outcome of running `(d + delta)`-improvement dynamics from a social
/// optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosRun {
    pub delta: Rational,
    pub alpha: Rational,
    pub optimum: State,
    pub optimum_cost: Rational,
    pub terminal_cost: Rational,
    /// `terminal_cost / optimum_cost`.
    pub ratio: Rational,
    /// `(d + 1) / (d + delta)`.
    pub bound: Rational,
    pub trace: MoveTrace,
}

pub fn pos_bound(d: u32, delta: &Rational) -> Rational {
    let d = Rational::from_integer(BigInt::from(d));
    (&d + Rational::one()) / (d + delta)
}

/// Starts at the lexicographically first social optimum and follows
/// `(d + delta)`-improvement moves, monitoring the `min{k_e+1, d+delta}`
/// potential, until an approximate equilibrium is reached.
pub fn converge_from_optimum(
    instance: &GameInstance,
    delta: &Rational,
    scheduler: &Scheduler,
    state_cap: usize,
) -> Result<PosRun> {
    check_delta(delta)?;
    let d = instance.max_degree();
    let alpha = Rational::from_integer(BigInt::from(d)) + delta;
    let profile = GammaProfile::pos(instance, delta)?;
    let (optima, optimum_cost) = oracle::exact_optima(instance, state_cap)?;
    let optimum = optima[0].clone();
    // A strictly decreasing potential visits every state at most once.
    let max_steps = usize::try_from(instance.state_count())
        .unwrap_or(usize::MAX)
        .max(1);
    let trace = run_dynamics(
        instance,
        &optimum,
        &alpha,
        scheduler,
        max_steps,
        Some(&profile),
    )?;
    if !trace.converged {
        return Err(Error::InvariantViolation(format!(
            "dynamics from the optimum did not converge within {max_steps} steps"
        )));
    }
    let terminal_cost = trace.terminal_social_cost().clone();
    Ok(PosRun {
        delta: delta.clone(),
        ratio: &terminal_cost / &optimum_cost,
        bound: pos_bound(d, delta),
        alpha,
        optimum,
        optimum_cost,
        terminal_cost,
        trace,
    })
}

/// [`converge_from_optimum`] with best-response scheduling and the default
/// state cap.
pub fn converge_from_optimum_default(instance: &GameInstance, delta: &Rational) -> Result<PosRun> {
    converge_from_optimum(instance, delta, &Scheduler::BestResponse, DEFAULT_STATE_CAP)
}
