//! Weighted congestion games with polynomial latencies.
//!
//! A resource `e` has latency `a_e * (total weight of its users)^k_e`, a
//! player's cost is the sum of latencies over the resources of its chosen
//! strategy, and the social cost is the weight-weighted sum of player costs.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, pow, Rational};

/// Default bound on the number of states any exhaustive routine will visit.
pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Player {
    pub id: usize,
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Resource {
    pub id: usize,
    pub coefficient: Rational,
    pub degree: u32,
}

/// A non-empty set of resource ids, kept sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy(Vec<usize>);

impl Strategy {
    pub fn resources(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, resource: usize) -> bool {
        self.0.binary_search(&resource).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Immutable game description. Player and resource ids are dense indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    players: Vec<Player>,
    resources: Vec<Resource>,
    strategies: Vec<Vec<Strategy>>,
    max_degree: u32,
}

impl GameInstance {
    /// Builds and validates a game.
    ///
    /// `resources` holds `(coefficient, degree)` pairs and `strategies[i]`
    /// lists the resource sets available to player `i`. Resource ids inside
    /// a strategy are sorted and deduplicated, then repeated strategies are
    /// dropped (first occurrence wins).
    pub fn new(
        weights: Vec<Rational>,
        resources: Vec<(Rational, u32)>,
        strategies: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("a game needs at least one player".into()));
        }
        if strategies.len() != weights.len() {
            return Err(Error::InvalidReference(format!(
                "{} strategy sets given for {} players",
                strategies.len(),
                weights.len()
            )));
        }
        let players = weights
            .into_iter()
            .enumerate()
            .map(|(id, weight)| {
                if weight <= Rational::zero() {
                    Err(Error::Domain(format!(
                        "player {id} weight {} must be positive",
                        format_rational(&weight)
                    )))
                } else {
                    Ok(Player { id, weight })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let resources = resources
            .into_iter()
            .enumerate()
            .map(|(id, (coefficient, degree))| {
                if coefficient <= Rational::zero() {
                    Err(Error::Domain(format!(
                        "resource {id} coefficient {} must be positive",
                        format_rational(&coefficient)
                    )))
                } else if degree < 1 {
                    Err(Error::Domain(format!(
                        "resource {id} degree must be at least 1"
                    )))
                } else {
                    Ok(Resource {
                        id,
                        coefficient,
                        degree,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut strategy_sets = Vec::with_capacity(strategies.len());
        for (player, set) in strategies.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Domain(format!("player {player} has no strategies")));
            }
            let mut cleaned: Vec<Strategy> = Vec::with_capacity(set.len());
            for (index, mut raw) in set.into_iter().enumerate() {
                if raw.is_empty() {
                    return Err(Error::Domain(format!(
                        "player {player} strategy {index} is empty"
                    )));
                }
                if let Some(&bad) = raw.iter().find(|&&e| e >= resources.len()) {
                    return Err(Error::InvalidReference(format!(
                        "player {player} strategy {index} uses unknown resource {bad}"
                    )));
                }
                raw.sort_unstable();
                raw.dedup();
                let strategy = Strategy(raw);
                if !cleaned.contains(&strategy) {
                    cleaned.push(strategy);
                }
            }
            strategy_sets.push(cleaned);
        }

        let max_degree = resources
            .iter()
            .map(|r| r.degree)
            .max()
            .ok_or_else(|| Error::Domain("a game needs at least one resource".into()))?;

        Ok(Self {
            players,
            resources,
            strategies: strategy_sets,
            max_degree,
        })
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_resources(&self) -> usize {
        self.resources.len()
    }

    /// `d`, the largest resource degree.
    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn player(&self, id: usize) -> Result<&Player> {
        self.players
            .get(id)
            .ok_or_else(|| Error::InvalidReference(format!("unknown player {id}")))
    }

    pub fn resource(&self, id: usize) -> Result<&Resource> {
        self.resources
            .get(id)
            .ok_or_else(|| Error::InvalidReference(format!("unknown resource {id}")))
    }

    pub fn weight(&self, player: usize) -> &Rational {
        &self.players[player].weight
    }

    pub fn strategies(&self, player: usize) -> &[Strategy] {
        &self.strategies[player]
    }

    pub fn strategy_sets(&self) -> &[Vec<Strategy>] {
        &self.strategies
    }

    /// Number of states `prod_i |S_i|`, exact.
    pub fn state_count(&self) -> BigUint {
        self.strategies
            .iter()
            .fold(BigUint::one(), |acc, s| acc * BigUint::from(s.len()))
    }

    /// Validates a strategy-index vector against this game.
    pub fn state(&self, choice: Vec<usize>) -> Result<State> {
        if choice.len() != self.players.len() {
            return Err(Error::InvalidReference(format!(
                "state has {} entries for {} players",
                choice.len(),
                self.players.len()
            )));
        }
        for (player, &c) in choice.iter().enumerate() {
            if c >= self.strategies[player].len() {
                return Err(Error::InvalidReference(format!(
                    "player {player} has no strategy {c}"
                )));
            }
        }
        Ok(State(choice))
    }

    pub fn chosen(&self, state: &State, player: usize) -> &Strategy {
        &self.strategies[player][state.0[player]]
    }

    fn check_state(&self, state: &State) -> Result<()> {
        self.state(state.0.clone()).map(|_| ())
    }

    /// `a_e * (sum of weights in user_set)^k_e`, zero for an empty set.
    pub fn latency(&self, resource: usize, user_set: &[usize]) -> Result<Rational> {
        let r = self.resource(resource)?;
        let mut congestion = Rational::zero();
        for &p in user_set {
            congestion += &self.player(p)?.weight;
        }
        Ok(latency_at(r, &congestion))
    }

    pub fn loads(&self, state: &State) -> LoadProfile {
        let mut users = vec![Vec::new(); self.resources.len()];
        let mut congestion = vec![Rational::zero(); self.resources.len()];
        for (player, &c) in state.0.iter().enumerate() {
            for &e in self.strategies[player][c].resources() {
                users[e].push(player);
                congestion[e] += &self.players[player].weight;
            }
        }
        LoadProfile { users, congestion }
    }

    /// `c_i(s)`, the sum of latencies over the player's chosen resources.
    pub fn player_cost(&self, state: &State, player: usize) -> Result<Rational> {
        self.player(player)?;
        self.check_state(state)?;
        let loads = self.loads(state);
        Ok(self.cost_under(&loads, state, player))
    }

    pub(crate) fn cost_under(&self, loads: &LoadProfile, state: &State, player: usize) -> Rational {
        self.chosen(state, player)
            .resources()
            .iter()
            .map(|&e| latency_at(&self.resources[e], &loads.congestion[e]))
            .sum()
    }

    /// Cost player `player` would pay after unilaterally switching to
    /// `strategy`, computed from the loads of the current state.
    pub fn deviation_cost(
        &self,
        loads: &LoadProfile,
        state: &State,
        player: usize,
        strategy: usize,
    ) -> Rational {
        let current = self.chosen(state, player);
        let weight = &self.players[player].weight;
        self.strategies[player][strategy]
            .resources()
            .iter()
            .map(|&e| {
                let resource = &self.resources[e];
                if current.contains(e) {
                    latency_at(resource, &loads.congestion[e])
                } else {
                    latency_at(resource, &(&loads.congestion[e] + weight))
                }
            })
            .sum()
    }

    /// `sum_i w_i c_i(s)`.
    pub fn social_cost_by_players(&self, state: &State) -> Rational {
        let loads = self.loads(state);
        (0..self.players.len())
            .map(|i| &self.players[i].weight * self.cost_under(&loads, state, i))
            .sum()
    }

    /// `sum_e a_e (congestion_e)^(k_e + 1)`.
    pub fn social_cost_by_resources(&self, state: &State) -> Rational {
        self.social_cost_from_loads(&self.loads(state))
    }

    pub(crate) fn social_cost_from_loads(&self, loads: &LoadProfile) -> Rational {
        self.resources
            .iter()
            .zip(&loads.congestion)
            .filter(|(_, x)| !x.is_zero())
            .map(|(r, x)| &r.coefficient * pow(x, r.degree + 1))
            .sum()
    }

    /// Social cost, computed in both the player and resource forms; the two
    /// must agree exactly.
    pub fn social_cost(&self, state: &State) -> Result<Rational> {
        self.check_state(state)?;
        let by_players = self.social_cost_by_players(state);
        let by_resources = self.social_cost_by_resources(state);
        if by_players != by_resources {
            return Err(Error::Internal(format!(
                "social cost forms disagree: {} vs {}",
                format_rational(&by_players),
                format_rational(&by_resources)
            )));
        }
        Ok(by_players)
    }

    /// Largest `tau` such that on every state every user `i` of every
    /// resource `e` sees `others >= tau * k_e * w_i`. `None` when some state
    /// leaves a player alone on a resource (the bound would force `tau <= 0`).
    pub fn tau_congestedness(&self, cap: usize) -> Result<Option<Rational>> {
        let space = StateSpace::new(self, cap)?;
        let mut best: Option<Rational> = None;
        for state in space.iter() {
            let loads = self.loads(&state);
            for (e, users) in loads.users.iter().enumerate() {
                let k = Rational::from_integer(self.resources[e].degree.into());
                for &i in users {
                    let w = &self.players[i].weight;
                    let others = &loads.congestion[e] - w;
                    if others.is_zero() {
                        return Ok(None);
                    }
                    let tau = others / (&k * w);
                    if best.as_ref().is_none_or(|b| tau < *b) {
                        best = Some(tau);
                    }
                }
            }
        }
        Ok(best)
    }
}

pub fn latency_at(resource: &Resource, congestion: &Rational) -> Rational {
    if congestion.is_zero() {
        return Rational::zero();
    }
    &resource.coefficient * pow(congestion, resource.degree)
}

/// One strategy index per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Vec<usize>);

impl State {
    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn choice(&self, player: usize) -> usize {
        self.0[player]
    }

    /// `[s_{-i}, strategy]`.
    pub fn with_choice(&self, player: usize, strategy: usize) -> State {
        let mut next = self.0.clone();
        next[player] = strategy;
        State(next)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Users and congestion of every resource in a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadProfile {
    pub users: Vec<Vec<usize>>,
    pub congestion: Vec<Rational>,
}

/// Mixed-radix indexing of the full state space, player 0 most significant,
/// so index order is lexicographic order on strategy indices.
#[derive(Debug, Clone)]
pub struct StateSpace {
    radices: Vec<usize>,
    size: usize,
}

impl StateSpace {
    pub fn new(instance: &GameInstance, cap: usize) -> Result<Self> {
        let radices: Vec<usize> = instance.strategies.iter().map(Vec::len).collect();
        let total = instance.state_count();
        let size = usize::try_from(&total)
            .ok()
            .filter(|&n| n <= cap)
            .ok_or_else(|| Error::capacity("state space size", &total, cap))?;
        Ok(Self { radices, size })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn index_of(&self, state: &State) -> usize {
        state
            .0
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn state_at(&self, mut index: usize) -> State {
        let mut choice = vec![0; self.radices.len()];
        for (slot, &r) in choice.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        State(choice)
    }

    pub fn iter(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size).map(|i| self.state_at(i))
    }
}
