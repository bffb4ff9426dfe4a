//! Instance documents, network path games and seeded generators.
//!
//! # Document format
//!
//! A line-oriented text file. Blank lines and lines starting with `#` are
//! ignored. The first content line is the header `wcg-instance 1`; the rest
//! is split into named sections:
//!
//! ```text
//! wcg-instance 1
//! [metadata]
//! name = two-links
//! seed = 7
//! generator = random
//! [players]
//! 0 1/1
//! 1 3/2
//! [resources]
//! 0 1/1 2
//! 1 5/2 1
//! [strategies]
//! 0: 0
//! 0: 1
//! 1: 0 1
//! ```
//!
//! `[players]` rows are `<id> <weight>`, `[resources]` rows are
//! `<id> <coefficient> <degree>`, and each `[strategies]` row
//! `<player>: <resource> ...` adds one strategy to that player, in file
//! order. Ids must be `0..n`. Rationals are `num/den` (a bare integer is
//! accepted on input). `[metadata]` is optional.
//!
//! The canonical form written by [`serialize_instance`] lists ids in
//! ascending order, writes every rational in lowest terms as `num/den`,
//! sorts the resources of each strategy and omits comments, so canonical
//! files are byte-stable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameInstance, DEFAULT_STATE_CAP};
use crate::rational::{format_rational, int, parse_rational, Rational};

pub const FORMAT_HEADER: &str = "wcg-instance 1";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub generator: Option<String>,
}

impl Metadata {
    fn is_empty(&self) -> bool {
        self.name.is_none() && self.seed.is_none() && self.generator.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDocument {
    pub instance: GameInstance,
    pub metadata: Metadata,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Metadata,
    Players,
    Resources,
    Strategies,
}

fn parse_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_id(token: &str, line: usize, field: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line, field, format!("'{token}' is not a valid id")))
}

fn parse_positive(token: &str, line: usize, field: &str) -> Result<Rational> {
    let value = parse_rational(token)
        .ok_or_else(|| parse_err(line, field, format!("malformed rational '{token}'")))?;
    if value <= Rational::zero() {
        return Err(parse_err(
            line,
            field,
            format!("'{token}' must be strictly positive"),
        ));
    }
    Ok(value)
}

/// Checks ids collected from one section form exactly `0..n`.
fn dense<T>(
    rows: BTreeMap<usize, (usize, T)>,
    field: &str,
    header_line: usize,
) -> Result<Vec<(usize, T)>> {
    for (expected, (&id, (line, _))) in rows.iter().enumerate() {
        if id != expected {
            return Err(parse_err(
                *line,
                field,
                format!("ids must be 0..n; expected {expected}, found {id}"),
            ));
        }
    }
    if rows.is_empty() {
        return Err(parse_err(header_line, field, "section is empty"));
    }
    Ok(rows.into_values().collect())
}

/// Parses and validates an instance document.
pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    let mut header_seen = false;
    let mut section: Option<Section> = None;
    let mut section_lines: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut metadata = Metadata::default();
    let mut players: BTreeMap<usize, (usize, Rational)> = BTreeMap::new();
    let mut resources: BTreeMap<usize, (usize, (Rational, u32))> = BTreeMap::new();
    let mut strategies: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut last_line = 0;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        last_line = line;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if !header_seen {
            if content != FORMAT_HEADER {
                return Err(parse_err(
                    line,
                    "header",
                    format!("expected '{FORMAT_HEADER}'"),
                ));
            }
            header_seen = true;
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let (next, key) = match name.trim() {
                "metadata" => (Section::Metadata, "metadata"),
                "players" => (Section::Players, "players"),
                "resources" => (Section::Resources, "resources"),
                "strategies" => (Section::Strategies, "strategies"),
                other => {
                    return Err(parse_err(
                        line,
                        "section",
                        format!("unknown section '{other}'"),
                    ))
                }
            };
            if section_lines.insert(key, line).is_some() {
                return Err(parse_err(
                    line,
                    "section",
                    format!("duplicate section '{key}'"),
                ));
            }
            section = Some(next);
            continue;
        }
        match section {
            None => return Err(parse_err(line, "section", "content before any section")),
            Some(Section::Metadata) => {
                let (key, value) = content
                    .split_once('=')
                    .ok_or_else(|| parse_err(line, "metadata", "expected 'key = value'"))?;
                let value = value.trim().to_string();
                match key.trim() {
                    "name" => metadata.name = Some(value),
                    "generator" => metadata.generator = Some(value),
                    "seed" => {
                        metadata.seed = Some(value.parse().map_err(|_| {
                            parse_err(
                                line,
                                "metadata.seed",
                                format!("'{value}' is not an unsigned integer"),
                            )
                        })?)
                    }
                    other => {
                        return Err(parse_err(
                            line,
                            "metadata",
                            format!("unknown key '{other}'"),
                        ))
                    }
                }
            }
            Some(Section::Players) => {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                if tokens.len() != 2 {
                    return Err(parse_err(line, "players", "expected '<id> <weight>'"));
                }
                let id = parse_id(tokens[0], line, "players.id")?;
                let weight = parse_positive(tokens[1], line, "players.weight")?;
                if players.insert(id, (line, weight)).is_some() {
                    return Err(parse_err(
                        line,
                        "players.id",
                        format!("duplicate player {id}"),
                    ));
                }
            }
            Some(Section::Resources) => {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                if tokens.len() != 3 {
                    return Err(parse_err(
                        line,
                        "resources",
                        "expected '<id> <coefficient> <degree>'",
                    ));
                }
                let id = parse_id(tokens[0], line, "resources.id")?;
                let coefficient = parse_positive(tokens[1], line, "resources.coefficient")?;
                let degree: u32 = tokens[2].parse().map_err(|_| {
                    parse_err(
                        line,
                        "resources.degree",
                        format!("'{}' is not an integer", tokens[2]),
                    )
                })?;
                if degree < 1 {
                    return Err(parse_err(
                        line,
                        "resources.degree",
                        "degree must be at least 1",
                    ));
                }
                if resources
                    .insert(id, (line, (coefficient, degree)))
                    .is_some()
                {
                    return Err(parse_err(
                        line,
                        "resources.id",
                        format!("duplicate resource {id}"),
                    ));
                }
            }
            Some(Section::Strategies) => {
                let (player, rest) = content.split_once(':').ok_or_else(|| {
                    parse_err(line, "strategies", "expected '<player>: <resource> ...'")
                })?;
                let player = parse_id(player.trim(), line, "strategies.player")?;
                let ids = rest
                    .split_whitespace()
                    .map(|t| parse_id(t, line, "strategies.resource"))
                    .collect::<Result<Vec<_>>>()?;
                if ids.is_empty() {
                    return Err(parse_err(line, "strategies", "strategy is empty"));
                }
                strategies.push((line, player, ids));
            }
        }
    }

    if !header_seen {
        return Err(parse_err(last_line.max(1), "header", "document is empty"));
    }
    for key in ["players", "resources", "strategies"] {
        if !section_lines.contains_key(key) {
            return Err(parse_err(last_line.max(1), key, "missing section"));
        }
    }
    let players = dense(players, "players.id", section_lines["players"])?;
    let resources = dense(resources, "resources.id", section_lines["resources"])?;

    let mut strategy_sets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); players.len()];
    for (line, player, ids) in strategies {
        if player >= players.len() {
            return Err(parse_err(
                line,
                "strategies.player",
                format!("unknown player {player}"),
            ));
        }
        if let Some(bad) = ids.iter().find(|&&e| e >= resources.len()) {
            return Err(parse_err(
                line,
                "strategies.resource",
                format!("unknown resource {bad}"),
            ));
        }
        strategy_sets[player].push(ids);
    }
    for (player, set) in strategy_sets.iter().enumerate() {
        if set.is_empty() {
            return Err(parse_err(
                players[player].0,
                "strategies",
                format!("player {player} has no strategies"),
            ));
        }
    }

    let instance = GameInstance::new(
        players.into_iter().map(|(_, w)| w).collect(),
        resources.into_iter().map(|(_, r)| r).collect(),
        strategy_sets,
    )?;
    Ok(InstanceDocument { instance, metadata })
}

pub fn parse_instance(text: &str) -> Result<GameInstance> {
    parse_document(text).map(|doc| doc.instance)
}

/// Canonical text form of an instance.
pub fn serialize_instance(instance: &GameInstance, metadata: &Metadata) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    if !metadata.is_empty() {
        out.push_str("[metadata]\n");
        if let Some(name) = &metadata.name {
            out.push_str(&format!("name = {}\n", name.trim()));
        }
        if let Some(seed) = metadata.seed {
            out.push_str(&format!("seed = {seed}\n"));
        }
        if let Some(generator) = &metadata.generator {
            out.push_str(&format!("generator = {}\n", generator.trim()));
        }
    }
    out.push_str("[players]\n");
    for p in instance.players() {
        out.push_str(&format!("{} {}\n", p.id, format_rational(&p.weight)));
    }
    out.push_str("[resources]\n");
    for r in instance.resources() {
        out.push_str(&format!(
            "{} {} {}\n",
            r.id,
            format_rational(&r.coefficient),
            r.degree
        ));
    }
    out.push_str("[strategies]\n");
    for (player, set) in instance.strategy_sets().iter().enumerate() {
        for strategy in set {
            let ids: Vec<String> = strategy.resources().iter().map(usize::to_string).collect();
            out.push_str(&format!("{player}: {}\n", ids.join(" ")));
        }
    }
    out
}

pub fn serialize_document(doc: &InstanceDocument) -> String {
    serialize_instance(&doc.instance, &doc.metadata)
}

/// Re-emits a document in canonical form.
pub fn canonicalize(text: &str) -> Result<String> {
    parse_document(text).map(|doc| serialize_document(&doc))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub coefficient: Rational,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkPlayer {
    pub weight: Rational,
    pub source: usize,
    pub target: usize,
}

/// A directed network whose arcs are the resources; each player picks a
/// simple source-target path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGameSpec {
    pub nodes: usize,
    pub arcs: Vec<Arc>,
    pub players: Vec<NetworkPlayer>,
    /// Most simple paths enumerated per player.
    pub path_cap: usize,
}

/// Simple paths from `source` to `target`, as arc-id lists, in DFS order
/// with out-arcs visited by (head node, arc id).
fn simple_paths(
    adjacency: &[Vec<usize>],
    arcs: &[Arc],
    source: usize,
    target: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut paths = Vec::new();
    let mut on_path = vec![false; adjacency.len()];
    let mut arc_stack: Vec<usize> = Vec::new();
    // (node, next out-arc position)
    let mut stack = vec![(source, 0usize)];
    on_path[source] = true;
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        let Some(&arc) = adjacency[node].get(*next) else {
            on_path[node] = false;
            stack.pop();
            arc_stack.pop();
            continue;
        };
        *next += 1;
        let head = arcs[arc].to;
        if on_path[head] {
            continue;
        }
        if head == target {
            let mut path = arc_stack.clone();
            path.push(arc);
            paths.push(path);
            if paths.len() > cap {
                return Err(Error::capacity(
                    format!("simple paths from {source} to {target}"),
                    format!("more than {cap}"),
                    cap,
                ));
            }
            continue;
        }
        on_path[head] = true;
        arc_stack.push(arc);
        stack.push((head, 0));
    }
    Ok(paths)
}

/// Compiles a network game into explicit strategy sets: arc `j` becomes
/// resource `j` and each simple source-target path becomes a strategy.
pub fn compile_network_game(spec: &NetworkGameSpec) -> Result<GameInstance> {
    for (id, arc) in spec.arcs.iter().enumerate() {
        if arc.from >= spec.nodes || arc.to >= spec.nodes {
            return Err(Error::InvalidReference(format!(
                "arc {id} uses an unknown node"
            )));
        }
    }
    let mut adjacency = vec![Vec::new(); spec.nodes];
    for (id, arc) in spec.arcs.iter().enumerate() {
        adjacency[arc.from].push(id);
    }
    for out in &mut adjacency {
        out.sort_by_key(|&id| (spec.arcs[id].to, id));
    }
    let mut strategies = Vec::with_capacity(spec.players.len());
    for (player, p) in spec.players.iter().enumerate() {
        if p.source >= spec.nodes || p.target >= spec.nodes {
            return Err(Error::InvalidReference(format!(
                "player {player} uses an unknown node"
            )));
        }
        let infeasible = Error::InfeasiblePlayer {
            player,
            source_node: p.source,
            target_node: p.target,
        };
        if p.source == p.target {
            return Err(infeasible);
        }
        let paths = simple_paths(&adjacency, &spec.arcs, p.source, p.target, spec.path_cap)?;
        if paths.is_empty() {
            return Err(infeasible);
        }
        strategies.push(paths);
    }
    GameInstance::new(
        spec.players.iter().map(|p| p.weight.clone()).collect(),
        spec.arcs
            .iter()
            .map(|a| (a.coefficient.clone(), a.degree))
            .collect(),
        strategies,
    )
}

/// Bounds for random rationals `num/den` with `1 <= num <= max_numerator`
/// and `1 <= den <= max_denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightRange {
    pub max_numerator: u32,
    pub max_denominator: u32,
}

impl Default for WeightRange {
    fn default() -> Self {
        Self {
            max_numerator: 5,
            max_denominator: 3,
        }
    }
}

impl WeightRange {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Rational {
        let num = rng.random_range(1..=self.max_numerator.max(1));
        let den = rng.random_range(1..=self.max_denominator.max(1));
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
}

const COEFFICIENT_RANGE: WeightRange = WeightRange {
    max_numerator: 4,
    max_denominator: 2,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomGameParams {
    pub seed: u64,
    pub players: usize,
    pub resources: usize,
    pub max_degree: u32,
    pub strategy_count: usize,
    pub strategy_size: usize,
    pub weights: WeightRange,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        Self {
            seed: 0,
            players: 3,
            resources: 4,
            max_degree: 2,
            strategy_count: 2,
            strategy_size: 2,
            weights: WeightRange::default(),
        }
    }
}

/// Seeded random game. Resource 0 always has degree `max_degree`, the
/// others are uniform in `1..=max_degree`. Each player receives up to
/// `strategy_count` distinct random subsets of `min(strategy_size,
/// resources)` resources.
pub fn generate_random(params: &RandomGameParams) -> Result<GameInstance> {
    if params.players == 0
        || params.resources == 0
        || params.max_degree == 0
        || params.strategy_count == 0
        || params.strategy_size == 0
    {
        return Err(Error::Domain(
            "generator parameters must all be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weights = (0..params.players)
        .map(|_| params.weights.draw(&mut rng))
        .collect();
    let resources = (0..params.resources)
        .map(|e| {
            let degree = if e == 0 {
                params.max_degree
            } else {
                rng.random_range(1..=params.max_degree)
            };
            (COEFFICIENT_RANGE.draw(&mut rng), degree)
        })
        .collect();
    let size = params.strategy_size.min(params.resources);
    let strategies = (0..params.players)
        .map(|_| {
            let mut set: Vec<Vec<usize>> = Vec::new();
            let mut attempts = 0;
            while set.len() < params.strategy_count && attempts < 10 * params.strategy_count {
                attempts += 1;
                let mut pick = sample(&mut rng, params.resources, size).into_vec();
                pick.sort_unstable();
                if !set.contains(&pick) {
                    set.push(pick);
                }
            }
            set
        })
        .collect();
    GameInstance::new(weights, resources, strategies)
}

fn ceil(value: &Rational) -> BigInt {
    let (q, r) = value.numer().div_rem(value.denom());
    if r.is_zero() {
        q
    } else {
        q + BigInt::one()
    }
}

/// Seeded `tau`-congested game with `players` players and uniform degree.
///
/// With `m = ceil(tau * degree) + 1`, resource `e` is part of every strategy
/// of the `m` players `e, e+1, ..., e+m-1 (mod n)`, so it always carries at
/// least `m` users; the other players may add it optionally. Weights lie in
/// `[1, (m-1) / (tau * degree)]`, which keeps `others >= tau * k * w_i` for
/// every user. The result is re-checked by exhaustive enumeration.
pub fn generate_tau_congested(
    seed: u64,
    tau: &Rational,
    players: usize,
    degree: u32,
) -> Result<GameInstance> {
    if *tau <= Rational::zero() {
        return Err(Error::Domain(format!(
            "tau = {} must be positive",
            format_rational(tau)
        )));
    }
    if degree == 0 || players == 0 {
        return Err(Error::Domain(
            "players and degree must be at least 1".into(),
        ));
    }
    let tau_k = tau * int(i64::from(degree));
    let m_big = ceil(&tau_k) + BigInt::one();
    let m = usize::try_from(&m_big)
        .ok()
        .filter(|&m| m <= players)
        .ok_or_else(|| {
            Error::Generator(format!(
                "tau = {} with degree {degree} needs at least {m_big} players, got {players}",
                format_rational(tau)
            ))
        })?;
    let spread = Rational::from_integer(BigInt::from(m - 1)) / &tau_k;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Rational> = (0..players)
        .map(|_| {
            if spread.is_one() {
                Rational::one()
            } else {
                let step = rng.random_range(0..=10i64);
                Rational::one()
                    + (&spread - Rational::one()) * Rational::new(step.into(), 10.into())
            }
        })
        .collect();
    let resources = (0..players)
        .map(|_| (COEFFICIENT_RANGE.draw(&mut rng), degree))
        .collect();
    let strategies = (0..players)
        .map(|i| {
            let mandatory: Vec<usize> = (0..players)
                .filter(|&e| (i + players - e) % players < m)
                .collect();
            let optional: Vec<usize> = (0..players).filter(|e| !mandatory.contains(e)).collect();
            let mut set = vec![mandatory.clone()];
            let extra = optional.len().min(2);
            for o in sample(&mut rng, optional.len(), extra).into_iter() {
                let mut s = mandatory.clone();
                s.push(optional[o]);
                set.push(s);
            }
            set
        })
        .collect();
    let instance = GameInstance::new(weights, resources, strategies)?;

    match instance.tau_congestedness(DEFAULT_STATE_CAP)? {
        Some(achieved) if achieved >= *tau => Ok(instance),
        achieved => Err(Error::Generator(format!(
            "constructed game is only {}-congested",
            achieved.map_or("0".to_string(), |a| format_rational(&a))
        ))),
    }
}

/// Seeded grid network: nodes `(r, c)` with arcs right and down, every
/// player routing from the top-left to the bottom-right corner.
pub fn generate_grid_network(
    seed: u64,
    rows: usize,
    cols: usize,
    players: usize,
    max_degree: u32,
    weights: WeightRange,
    path_cap: usize,
) -> Result<GameInstance> {
    if rows == 0 || cols == 0 || players == 0 || max_degree == 0 || rows * cols < 2 {
        return Err(Error::Domain(
            "grid needs at least two nodes, one player and degree >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node = |r: usize, c: usize| r * cols + c;
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            for (nr, nc) in [(r, c + 1), (r + 1, c)] {
                if nr < rows && nc < cols {
                    arcs.push(Arc {
                        from: node(r, c),
                        to: node(nr, nc),
                        coefficient: COEFFICIENT_RANGE.draw(&mut rng),
                        degree: rng.random_range(1..=max_degree),
                    });
                }
            }
        }
    }
    if let Some(first) = arcs.first_mut() {
        first.degree = max_degree;
    }
    let players = (0..players)
        .map(|_| NetworkPlayer {
            weight: weights.draw(&mut rng),
            source: 0,
            target: node(rows - 1, cols - 1),
        })
        .collect();
    compile_network_game(&NetworkGameSpec {
        nodes: rows * cols,
        arcs,
        players,
        path_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const MINIMAL: &str =
        "wcg-instance 1\n[players]\n0 1/1\n[resources]\n0 1/1 1\n[strategies]\n0: 0\n";

    #[test]
    fn minimal_document() {
        let g = parse_instance(MINIMAL).unwrap();
        assert_eq!(g.num_players(), 1);
        assert_eq!(serialize_instance(&g, &Metadata::default()), MINIMAL);
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let check = |text: &str, want_line: usize, want_field: &str| match parse_instance(text) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!((line, field.as_str()), (want_line, want_field), "{text}")
            }
            other => panic!("expected parse error for {text:?}, got {other:?}"),
        };
        check(
            &MINIMAL.replace("0 1/1\n[res", "0 0/1\n[res"),
            3,
            "players.weight",
        );
        check(
            &MINIMAL.replace("0 1/1\n[res", "0 1/x\n[res"),
            3,
            "players.weight",
        );
        check(&MINIMAL.replace("0: 0", "0: 3"), 7, "strategies.resource");
        check(
            &MINIMAL.replace("0 1/1 1", "0 1/1 0"),
            5,
            "resources.degree",
        );
        check(&MINIMAL.replace("0: 0\n", ""), 3, "strategies");
        check(&MINIMAL.replace("0: 0", "0:"), 7, "strategies");
        check(&MINIMAL.replace("wcg-instance 1", "wcg 2"), 1, "header");
        check(
            &MINIMAL.replace("[players]\n0", "[players]\n1"),
            3,
            "players.id",
        );
    }

    #[test]
    fn comments_and_metadata() {
        let text = "# a game\nwcg-instance 1\n\n[metadata]\nseed = 9\nname =  tiny \n[players]\n0 2\n[resources]\n0 6/4 2\n[strategies]\n0: 0 0\n";
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.metadata.seed, Some(9));
        assert_eq!(doc.metadata.name.as_deref(), Some("tiny"));
        assert_eq!(
            serialize_document(&doc),
            "wcg-instance 1\n[metadata]\nname = tiny\nseed = 9\n[players]\n0 2/1\n[resources]\n0 3/2 2\n[strategies]\n0: 0\n"
        );
    }

    fn arc(from: usize, to: usize) -> Arc {
        Arc {
            from,
            to,
            coefficient: int(1),
            degree: 1,
        }
    }

    #[test]
    fn parallel_arcs() {
        let g = compile_network_game(&NetworkGameSpec {
            nodes: 2,
            arcs: vec![arc(0, 1), arc(0, 1)],
            players: vec![NetworkPlayer {
                weight: int(1),
                source: 0,
                target: 1,
            }],
            path_cap: 10,
        })
        .unwrap();
        let paths: Vec<&[usize]> = g.strategies(0).iter().map(|s| s.resources()).collect();
        assert_eq!(paths, vec![&[0][..], &[1][..]]);
    }

    #[test]
    fn grid_paths() {
        // 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3
        let spec = NetworkGameSpec {
            nodes: 4,
            arcs: vec![arc(0, 1), arc(0, 2), arc(1, 3), arc(2, 3)],
            players: vec![NetworkPlayer {
                weight: ratio(3, 2),
                source: 0,
                target: 3,
            }],
            path_cap: 10,
        };
        let g = compile_network_game(&spec).unwrap();
        let paths: Vec<&[usize]> = g.strategies(0).iter().map(|s| s.resources()).collect();
        assert_eq!(paths, vec![&[0, 2][..], &[1, 3][..]]);

        let capped = NetworkGameSpec {
            path_cap: 1,
            ..spec.clone()
        };
        assert!(matches!(
            compile_network_game(&capped),
            Err(Error::Capacity { .. })
        ));

        let stranded = NetworkGameSpec {
            players: vec![NetworkPlayer {
                weight: int(1),
                source: 3,
                target: 0,
            }],
            ..spec
        };
        assert!(matches!(
            compile_network_game(&stranded),
            Err(Error::InfeasiblePlayer { player: 0, .. })
        ));
    }

    #[test]
    fn cycles_in_network_do_not_repeat_nodes() {
        let spec = NetworkGameSpec {
            nodes: 3,
            arcs: vec![arc(0, 1), arc(1, 0), arc(1, 2), arc(0, 2)],
            players: vec![NetworkPlayer {
                weight: int(1),
                source: 0,
                target: 2,
            }],
            path_cap: 10,
        };
        let g = compile_network_game(&spec).unwrap();
        assert_eq!(g.strategies(0).len(), 2);
    }

    #[test]
    fn random_generator_is_deterministic() {
        let params = RandomGameParams {
            seed: 11,
            players: 4,
            resources: 5,
            max_degree: 3,
            strategy_count: 3,
            strategy_size: 2,
            weights: WeightRange::default(),
        };
        let a = generate_random(&params).unwrap();
        assert_eq!(a, generate_random(&params).unwrap());
        assert_eq!(a.max_degree(), 3);
        let linear = generate_random(&RandomGameParams {
            max_degree: 1,
            ..params.clone()
        })
        .unwrap();
        assert!(linear.resources().iter().all(|r| r.degree == 1));
        let cube = generate_random(&RandomGameParams {
            resources: 6,
            ..params
        })
        .unwrap();
        assert!(cube.state_count() <= 81u32.into());
    }

    #[test]
    fn tau_generator() {
        let g = generate_tau_congested(1, &int(1), 4, 2).unwrap();
        assert!(g.players().iter().all(|p| p.weight == int(1)));
        for state in crate::oracle::enumerate_states(&g, 1000).unwrap() {
            assert!(g
                .loads(&state)
                .users
                .iter()
                .all(|u| u.is_empty() || u.len() >= 3));
        }
        let g = generate_tau_congested(2, &int(2), 3, 1).unwrap();
        for state in crate::oracle::enumerate_states(&g, 1000).unwrap() {
            assert!(g
                .loads(&state)
                .users
                .iter()
                .all(|u| u.is_empty() || u.len() >= 3));
        }
        let g = generate_tau_congested(5, &ratio(3, 4), 5, 2).unwrap();
        assert!(g.tau_congestedness(1000).unwrap().unwrap() >= ratio(3, 4));
        assert!(matches!(
            generate_tau_congested(1, &int(2), 4, 2),
            Err(Error::Generator(_))
        ));
    }

    #[test]
    fn grid_generator() {
        let g = generate_grid_network(3, 2, 3, 2, 2, WeightRange::default(), 100).unwrap();
        assert_eq!(g.strategies(0).len(), 3);
        assert_eq!(g.max_degree(), 2);
    }
}
