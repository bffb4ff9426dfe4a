//! Exhaustive ground truth for desk-scale games.
//!
//! Every routine here enumerates the full state space (bounded by a cap)
//! and works in exact arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;

use crate::dynamics::{check_alpha, improving_moves_unchecked};
use crate::error::{Error, Result};
use crate::game::{GameInstance, State, StateSpace};
use crate::potential::{potential_unchecked, GammaProfile};
use crate::rational::Rational;

/// Every state exactly once, in lexicographic order of strategy indices.
pub fn enumerate_states(
    instance: &GameInstance,
    cap: usize,
) -> Result<impl Iterator<Item = State>> {
    let space = StateSpace::new(instance, cap)?;
    Ok((0..space.len()).map(move |i| space.state_at(i)))
}

/// All states of minimum social cost, and that cost.
pub fn exact_optima(instance: &GameInstance, cap: usize) -> Result<(Vec<State>, Rational)> {
    let space = StateSpace::new(instance, cap)?;
    let costs: Vec<Rational> = (0..space.len())
        .into_par_iter()
        .map(|i| instance.social_cost(&space.state_at(i)))
        .collect::<Result<_>>()?;
    let best = costs
        .iter()
        .min()
        .cloned()
        .ok_or_else(|| Error::Internal("empty state space".into()))?;
    let optima = costs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == best)
        .map(|(i, _)| space.state_at(i))
        .collect();
    Ok((optima, best))
}

/// `E(alpha)`: states without any α-improvement move, in lexicographic order.
pub fn equilibrium_set(
    instance: &GameInstance,
    alpha: &Rational,
    cap: usize,
) -> Result<Vec<State>> {
    check_alpha(alpha)?;
    let space = StateSpace::new(instance, cap)?;
    Ok((0..space.len())
        .into_par_iter()
        .filter_map(|i| {
            let state = space.state_at(i);
            improving_moves_unchecked(instance, &state, alpha)
                .is_empty()
                .then_some(state)
        })
        .collect())
}

/// Exact α-approximate price of stability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosValue {
    Defined(Rational),
    /// `E(alpha)` is empty.
    Undefined,
}

impl PosValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            PosValue::Defined(v) => Some(v),
            PosValue::Undefined => None,
        }
    }
}

/// `min_{e in E(alpha)} C(e) / C(o)`.
pub fn exact_pos(instance: &GameInstance, alpha: &Rational, cap: usize) -> Result<PosValue> {
    let (_, optimum) = exact_optima(instance, cap)?;
    let equilibria = equilibrium_set(instance, alpha, cap)?;
    pos_from(instance, &equilibria, &optimum)
}

fn pos_from(instance: &GameInstance, equilibria: &[State], optimum: &Rational) -> Result<PosValue> {
    let mut best: Option<Rational> = None;
    for s in equilibria {
        let cost = instance.social_cost(s)?;
        if best.as_ref().is_none_or(|b| cost < *b) {
            best = Some(cost);
        }
    }
    Ok(best.map_or(PosValue::Undefined, |c| PosValue::Defined(c / optimum)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub player: usize,
    pub factor: Rational,
}

/// All α-improvement moves of a game as a directed graph on state indices.
#[derive(Debug, Clone)]
pub struct ImprovementGraph {
    space: StateSpace,
    alpha: Rational,
    edges: Vec<Vec<Edge>>,
}

impl ImprovementGraph {
    pub fn build(instance: &GameInstance, alpha: &Rational, cap: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let space = StateSpace::new(instance, cap)?;
        let edges = (0..space.len())
            .into_par_iter()
            .map(|i| {
                let state = space.state_at(i);
                improving_moves_unchecked(instance, &state, alpha)
                    .into_iter()
                    .map(|m| Edge {
                        target: space.index_of(&state.with_choice(m.player, m.to)),
                        player: m.player,
                        factor: m.improvement_factor,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            space,
            alpha: alpha.clone(),
            edges,
        })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn node_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn edges_from(&self, node: usize) -> &[Edge] {
        &self.edges[node]
    }

    pub fn state(&self, node: usize) -> State {
        self.space.state_at(node)
    }

    pub fn sinks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&i| self.edges[i].is_empty())
    }

    /// A directed cycle, as the list of nodes along it, or `None` when the
    /// graph is acyclic.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let n = self.edges.len();
        let mut mark = vec![Mark::New; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // (node, next edge to examine)
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Open;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(edge) = self.edges[node].get(*next) {
                    *next += 1;
                    let t = edge.target;
                    match mark[t] {
                        Mark::New => {
                            mark[t] = Mark::Open;
                            parent[t] = node;
                            stack.push((t, 0));
                        }
                        Mark::Open => {
                            let mut cycle = vec![node];
                            let mut cur = node;
                            while cur != t {
                                cur = parent[cur];
                                cycle.push(cur);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }
}

/// An improvement edge along which the candidate potential failed to drop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeViolation {
    pub from: State,
    pub to: State,
    pub player: usize,
    pub factor: Rational,
    pub potential_before: Rational,
    pub potential_after: Rational,
}

impl fmt::Display for EdgeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} (player {})", self.from, self.to, self.player)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotentialCheck {
    Pass { edges_checked: usize },
    Violation(Box<EdgeViolation>),
}

impl PotentialCheck {
    pub fn passed(&self) -> bool {
        matches!(self, PotentialCheck::Pass { .. })
    }
}

/// Checks `POT_gamma(s') < POT_gamma(s)` on every α-improvement edge. The
/// first violating edge in state order is reported.
pub fn verify_potential_on_graph(
    instance: &GameInstance,
    profile: &GammaProfile,
    alpha: &Rational,
    cap: usize,
) -> Result<PotentialCheck> {
    let profile = GammaProfile::new(instance, profile.gamma().to_vec())?;
    let graph = ImprovementGraph::build(instance, alpha, cap)?;
    let potentials: Vec<Rational> = (0..graph.node_count())
        .into_par_iter()
        .map(|i| potential_unchecked(instance, &profile, &graph.state(i)))
        .collect();
    let mut checked = 0;
    for (from, edges) in graph.edges.iter().enumerate() {
        for edge in edges {
            checked += 1;
            if potentials[edge.target] >= potentials[from] {
                return Ok(PotentialCheck::Violation(Box::new(EdgeViolation {
                    from: graph.state(from),
                    to: graph.state(edge.target),
                    player: edge.player,
                    factor: edge.factor.clone(),
                    potential_before: potentials[from].clone(),
                    potential_after: potentials[edge.target].clone(),
                })));
            }
        }
    }
    Ok(PotentialCheck::Pass {
        edges_checked: checked,
    })
}

/// A cycle of α-improvement moves, if one exists. `None` means every
/// α-improvement sequence terminates.
pub fn find_improvement_cycle(
    instance: &GameInstance,
    alpha: &Rational,
    cap: usize,
) -> Result<Option<Vec<State>>> {
    let graph = ImprovementGraph::build(instance, alpha, cap)?;
    Ok(graph
        .find_cycle()
        .map(|nodes| nodes.into_iter().map(|n| graph.state(n)).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub state_count: usize,
    pub optima: Vec<State>,
    pub optimum_cost: Rational,
    pub equilibria: BTreeMap<Rational, Vec<State>>,
    pub exact_pos: BTreeMap<Rational, PosValue>,
    pub improvement_graph_edges: BTreeMap<Rational, usize>,
    pub cycles: BTreeMap<Rational, Option<Vec<State>>>,
}

/// Full exhaustive analysis for each α in `alphas`.
pub fn analyze(instance: &GameInstance, alphas: &[Rational], cap: usize) -> Result<OracleReport> {
    let space = StateSpace::new(instance, cap)?;
    let (optima, optimum_cost) = exact_optima(instance, cap)?;
    let mut report = OracleReport {
        state_count: space.len(),
        optima,
        optimum_cost,
        equilibria: BTreeMap::new(),
        exact_pos: BTreeMap::new(),
        improvement_graph_edges: BTreeMap::new(),
        cycles: BTreeMap::new(),
    };
    for alpha in alphas {
        let graph = ImprovementGraph::build(instance, alpha, cap)?;
        let equilibria: Vec<State> = graph.sinks().map(|i| graph.state(i)).collect();
        let pos = pos_from(instance, &equilibria, &report.optimum_cost)?;
        report.exact_pos.insert(alpha.clone(), pos);
        report.equilibria.insert(alpha.clone(), equilibria);
        report
            .improvement_graph_edges
            .insert(alpha.clone(), graph.edge_count());
        report.cycles.insert(
            alpha.clone(),
            graph
                .find_cycle()
                .map(|c| c.into_iter().map(|n| graph.state(n)).collect()),
        );
    }
    Ok(report)
}

/// Largest improvement factor of any unilateral deviation in the game; any
/// α at or above it makes every state an equilibrium.
pub fn max_deviation_factor(instance: &GameInstance, cap: usize) -> Result<Rational> {
    let one = Rational::one();
    Ok(ImprovementGraph::build(instance, &one, cap)?
        .edges
        .iter()
        .flatten()
        .map(|e| e.factor.clone())
        .max()
        .unwrap_or(one))
}
