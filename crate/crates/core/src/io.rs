//! Game file format, result JSON, DOT export and the seeded random
//! generator.
//!
//! The game format is line-oriented with whitespace-separated tokens and `#`
//! comments:
//!
//! ```text
//! game g2
//! players 2
//! state v owner=2
//! state t owner=1
//! edge v t
//! init v
//! objective 1 reach t
//! objective 2 parity v:0 t:1 d:2
//! ```
//!
//! All outputs are byte-deterministic for fixed inputs and seeds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{validate_arena, Arena, ArenaError, PlayerId, RawArena, StateIdx};
use crate::automata::{dpa_conj_capped, Dpa};
use crate::objectives::{
    compile_expr, compile_objective_to_dpa, retaliation_objective, Objective, ObjectiveKind,
    ObjectiveProfile,
};
use crate::rng::SplitMix64;
use crate::solver::{Certificate, ProductNode, Verdict};
use crate::verify::VerifyError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("player {0} has no objective")]
    MissingObjective(u32),
    #[error("player {0} has more than one objective")]
    DuplicateObjective(u32),
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        reason: reason.into(),
    }
}

enum RawObjective {
    Set(ObjectiveKind, Vec<String>),
    Parity(Vec<(String, u32)>),
}

/// Parses the line-oriented game format into a validated pair.
pub fn parse_game_file(text: &str) -> Result<(Arena, ObjectiveProfile), ParseError> {
    let mut players: Option<u32> = None;
    let mut states: Vec<(String, u32)> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut initial: Option<String> = None;
    let mut objectives: BTreeMap<u32, (usize, RawObjective)> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "game" => {
                if tokens.len() != 2 {
                    return Err(syntax(line_no, "expected: game <name>"));
                }
            }
            "players" => {
                if players.is_some() {
                    return Err(syntax(line_no, "duplicate players line"));
                }
                let n: u32 = tokens
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, "expected: players <count>"))?;
                if n == 0 {
                    return Err(syntax(line_no, "player count must be at least 1"));
                }
                players = Some(n);
            }
            "state" => {
                if tokens.len() != 3 {
                    return Err(syntax(line_no, "expected: state <id> owner=<player>"));
                }
                let owner = tokens[2]
                    .strip_prefix("owner=")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, "expected owner=<player>"))?;
                states.push((tokens[1].to_owned(), owner));
            }
            "edge" => {
                if tokens.len() != 3 {
                    return Err(syntax(line_no, "expected: edge <from> <to>"));
                }
                edges.push((tokens[1].to_owned(), tokens[2].to_owned()));
            }
            "init" => {
                if initial.is_some() {
                    return Err(syntax(line_no, "duplicate init line"));
                }
                if tokens.len() != 2 {
                    return Err(syntax(line_no, "expected: init <state>"));
                }
                initial = Some(tokens[1].to_owned());
            }
            "objective" => {
                if tokens.len() < 3 {
                    return Err(syntax(line_no, "expected: objective <player> <class> ..."));
                }
                let player: u32 = tokens[1]
                    .parse()
                    .map_err(|_| syntax(line_no, "objective player must be a number"))?;
                let raw = match tokens[2] {
                    "parity" => {
                        let mut map = Vec::new();
                        for tok in &tokens[3..] {
                            let (name, pri) = tok.split_once(':').ok_or_else(|| {
                                syntax(line_no, "parity entries are state:priority")
                            })?;
                            let pri: u32 = pri
                                .parse()
                                .map_err(|_| syntax(line_no, "parity priority must be a number"))?;
                            map.push((name.to_owned(), pri));
                        }
                        RawObjective::Parity(map)
                    }
                    class => {
                        let kind = ObjectiveKind::parse(class).ok_or_else(|| {
                            syntax(line_no, format!("unknown objective class `{class}`"))
                        })?;
                        RawObjective::Set(
                            kind,
                            tokens[3..].iter().map(|t| (*t).to_owned()).collect(),
                        )
                    }
                };
                if objectives.insert(player, (line_no, raw)).is_some() {
                    return Err(ParseError::DuplicateObjective(player));
                }
            }
            other => return Err(syntax(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let players = players.ok_or_else(|| syntax(0, "missing players line"))?;
    let initial = initial.ok_or_else(|| syntax(0, "missing init line"))?;
    let arena = validate_arena(&RawArena {
        player_count: players,
        states,
        edges,
        initial,
    })?;

    let mut list = Vec::with_capacity(players as usize);
    for player in 1..=players {
        let (line_no, raw) = objectives
            .get(&player)
            .ok_or(ParseError::MissingObjective(player))?;
        list.push(resolve_objective(&arena, *line_no, raw)?);
    }
    for player in objectives.keys() {
        if *player == 0 || *player > players {
            return Err(syntax(
                objectives[player].0,
                format!("objective for unknown player {player}"),
            ));
        }
    }
    let profile = ObjectiveProfile::new(list);
    Ok((arena, profile))
}

fn resolve_objective(
    arena: &Arena,
    line: usize,
    raw: &RawObjective,
) -> Result<Objective, ParseError> {
    let lookup = |name: &str| -> Result<StateIdx, ParseError> {
        arena
            .index_of(name)
            .ok_or_else(|| syntax(line, format!("unknown state `{name}` in objective")))
    };
    match raw {
        RawObjective::Set(kind, names) => {
            let mut set = BTreeSet::new();
            for name in names {
                set.insert(lookup(name)?);
            }
            Ok(match kind {
                ObjectiveKind::Reachability => Objective::Reachability { target: set },
                ObjectiveKind::Safety => Objective::Safety { safe: set },
                ObjectiveKind::Buchi => Objective::Buchi { rec: set },
                ObjectiveKind::CoBuchi => Objective::CoBuchi { tail: set },
                ObjectiveKind::Parity => unreachable!("parity parsed separately"),
            })
        }
        RawObjective::Parity(entries) => {
            let mut map = BTreeMap::new();
            for (name, pri) in entries {
                let s = lookup(name)?;
                if map.insert(s, *pri).is_some() {
                    return Err(syntax(line, format!("state `{name}` mapped twice")));
                }
                if *pri as usize > 2 * arena.state_count() {
                    return Err(syntax(line, format!("priority {pri} exceeds 2*|states|")));
                }
            }
            if let Some(missing) = arena.states().find(|s| !map.contains_key(s)) {
                return Err(syntax(
                    line,
                    format!(
                        "parity must map all states (missing `{}`)",
                        arena.name(missing)
                    ),
                ));
            }
            Ok(Objective::Parity { priority: map })
        }
    }
}

/// Renders a game back into the file format; `parse_game_file` of the result
/// reproduces the pair.
pub fn serialize_game(name: &str, arena: &Arena, profile: &ObjectiveProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game {name}");
    let _ = writeln!(out, "players {}", arena.player_count());
    for s in arena.states() {
        let _ = writeln!(out, "state {} owner={}", arena.name(s), arena.owner(s).0);
    }
    for s in arena.states() {
        for &d in arena.successors(s) {
            let _ = writeln!(out, "edge {} {}", arena.name(s), arena.name(d));
        }
    }
    let _ = writeln!(out, "init {}", arena.name(arena.initial()));
    for (idx, obj) in profile.iter().enumerate() {
        let player = idx + 1;
        let line = match obj {
            Objective::Reachability { target } => set_line(arena, "reach", target),
            Objective::Safety { safe } => set_line(arena, "safety", safe),
            Objective::Buchi { rec } => set_line(arena, "buchi", rec),
            Objective::CoBuchi { tail } => set_line(arena, "cobuchi", tail),
            Objective::Parity { priority } => {
                let entries: Vec<String> = priority
                    .iter()
                    .map(|(&s, &p)| format!("{}:{}", arena.name(s), p))
                    .collect();
                format!("parity {}", entries.join(" "))
            }
        };
        let _ = writeln!(out, "objective {player} {line}");
    }
    out
}

fn set_line(arena: &Arena, class: &str, set: &BTreeSet<StateIdx>) -> String {
    let mut line = class.to_owned();
    for &s in set {
        line.push(' ');
        line.push_str(arena.name(s));
    }
    line
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ResultDoc {
    verdict: String,
    players: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CertDoc {
    stem: Vec<String>,
    cycle: Vec<String>,
    retaliation: BTreeMap<String, Vec<RetalEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RetalEntry {
    state: String,
    memory: usize,
    choice: String,
}

/// Stable-key-ordered JSON for a solver verdict; byte-identical across runs.
pub fn serialize_result(arena: &Arena, verdict: &Verdict) -> String {
    let doc = match verdict {
        Verdict::NotExists => ResultDoc {
            verdict: "not_exists".to_owned(),
            players: arena.player_count(),
            certificate: None,
        },
        Verdict::Exists(cert) => ResultDoc {
            verdict: "exists".to_owned(),
            players: arena.player_count(),
            certificate: Some(cert_doc(arena, cert)),
        },
    };
    let mut text = serde_json::to_string(&doc).expect("result serializes");
    text.push('\n');
    text
}

fn cert_doc(arena: &Arena, cert: &Certificate) -> CertDoc {
    let names = |nodes: &[ProductNode]| -> Vec<String> {
        nodes
            .iter()
            .map(|n| arena.name(n.arena_state).to_owned())
            .collect()
    };
    let mut retaliation = BTreeMap::new();
    for (idx, map) in cert.retaliation.iter().enumerate() {
        let entries: Vec<RetalEntry> = map
            .iter()
            .map(|(&(v, q), &w)| RetalEntry {
                state: arena.name(v).to_owned(),
                memory: q,
                choice: arena.name(w).to_owned(),
            })
            .collect();
        retaliation.insert((idx + 1).to_string(), entries);
    }
    CertDoc {
        stem: names(&cert.stem),
        cycle: names(&cert.cycle),
        retaliation,
    }
}

/// Rebuilds a full certificate from result JSON, recomputing every automaton
/// component along the lasso deterministically.
pub fn parse_certificate_json(
    text: &str,
    arena: &Arena,
    profile: &ObjectiveProfile,
) -> Result<Certificate, VerifyError> {
    let malformed = |msg: String| VerifyError::MalformedCertificate(msg);
    let doc: ResultDoc =
        serde_json::from_str(text).map_err(|e| malformed(format!("bad certificate JSON: {e}")))?;
    let cert = doc
        .certificate
        .ok_or_else(|| malformed("result has no certificate".to_owned()))?;

    let lookup = |name: &str| -> Result<StateIdx, VerifyError> {
        arena
            .index_of(name)
            .ok_or_else(|| malformed(format!("unknown state `{name}` in certificate")))
    };
    let stem_states: Vec<StateIdx> = cert
        .stem
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<_, _>>()?;
    let cycle_states: Vec<StateIdx> = cert
        .cycle
        .iter()
        .map(|n| lookup(n))
        .collect::<Result<_, _>>()?;
    if stem_states.is_empty() || cycle_states.is_empty() {
        return Err(malformed("stem and cycle must be nonempty".to_owned()));
    }

    let n = arena.player_count() as usize;
    let retal_dpas: Vec<Dpa> = (1..=n as u32)
        .map(|i| {
            compile_expr(
                arena,
                &retaliation_objective(PlayerId(i), profile),
                usize::MAX,
            )
            .expect("retaliation automaton at desk scale")
        })
        .collect();
    let phi: Vec<Dpa> = profile
        .iter()
        .map(|o| compile_objective_to_dpa(arena, o))
        .collect();
    let refs: Vec<&Dpa> = phi.iter().collect();
    let all_dpa = dpa_conj_capped(&refs, usize::MAX).expect("conjunction at desk scale");

    // run every automaton along the lasso to rebuild the product nodes
    let mut all_q = all_dpa.initial;
    let mut retal_q: Vec<usize> = retal_dpas.iter().map(|d| d.initial).collect();
    let advance = |s: StateIdx, all_q: &mut usize, retal_q: &mut Vec<usize>| -> ProductNode {
        *all_q = all_dpa.delta[*all_q][s];
        for (q, d) in retal_q.iter_mut().zip(&retal_dpas) {
            *q = d.delta[*q][s];
        }
        ProductNode {
            arena_state: s,
            all_state: *all_q,
            retal: retal_q.clone(),
        }
    };
    let stem: Vec<ProductNode> = stem_states
        .iter()
        .map(|&s| advance(s, &mut all_q, &mut retal_q))
        .collect();
    let cycle: Vec<ProductNode> = cycle_states
        .iter()
        .map(|&s| advance(s, &mut all_q, &mut retal_q))
        .collect();

    let mut retaliation = vec![BTreeMap::new(); n];
    for (key, entries) in &cert.retaliation {
        let player: usize = key
            .parse::<usize>()
            .ok()
            .filter(|p| (1..=n).contains(p))
            .ok_or_else(|| malformed(format!("bad retaliation player `{key}`")))?;
        let dpa = &retal_dpas[player - 1];
        let map = &mut retaliation[player - 1];
        for entry in entries {
            let v = lookup(&entry.state)?;
            let w = lookup(&entry.choice)?;
            if entry.memory >= dpa.state_count() {
                return Err(malformed(format!(
                    "memory {} out of range for player {player}",
                    entry.memory
                )));
            }
            map.insert((v, entry.memory), w);
        }
    }

    Ok(Certificate {
        stem,
        cycle,
        retaliation,
        player_count: arena.player_count(),
        objective_kinds: profile.kinds(),
    })
}

const OWNER_SHAPES: [&str; 6] = [
    "circle",
    "box",
    "diamond",
    "hexagon",
    "octagon",
    "trapezium",
];

/// DOT rendering of the arena; certificate edges are drawn bold when given.
pub fn export_dot(arena: &Arena, profile: &ObjectiveProfile, cert: Option<&Certificate>) -> String {
    let mut highlight: BTreeSet<(StateIdx, StateIdx)> = BTreeSet::new();
    if let Some(cert) = cert {
        let lasso: Vec<StateIdx> = cert
            .stem
            .iter()
            .chain(&cert.cycle)
            .map(|p| p.arena_state)
            .collect();
        for pair in lasso.windows(2) {
            highlight.insert((pair[0], pair[1]));
        }
        highlight.insert((*lasso.last().unwrap(), cert.cycle[0].arena_state));
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph game {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let objectives: Vec<String> = profile
        .iter()
        .enumerate()
        .map(|(i, o)| format!("P{}: {}", i + 1, objective_summary(arena, o)))
        .collect();
    let _ = writeln!(out, "  label=\"{}\";", objectives.join("\\n"));
    for s in arena.states() {
        let shape = OWNER_SHAPES[(arena.owner(s).0 as usize - 1) % OWNER_SHAPES.len()];
        let peripheries = if s == arena.initial() { 2 } else { 1 };
        let _ = writeln!(
            out,
            "  \"{}\" [label=\"{} (P{})\", shape={}, peripheries={}];",
            arena.name(s),
            arena.name(s),
            arena.owner(s).0,
            shape,
            peripheries
        );
    }
    for s in arena.states() {
        for &d in arena.successors(s) {
            if highlight.contains(&(s, d)) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [style=bold, color=red];",
                    arena.name(s),
                    arena.name(d)
                );
            } else {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", arena.name(s), arena.name(d));
            }
        }
    }
    let _ = writeln!(out, "}}");
    out
}

fn objective_summary(arena: &Arena, obj: &Objective) -> String {
    let names = |set: &BTreeSet<StateIdx>| -> String {
        let list: Vec<&str> = set.iter().map(|&s| arena.name(s)).collect();
        list.join(",")
    };
    match obj {
        Objective::Reachability { target } => format!("reach {{{}}}", names(target)),
        Objective::Safety { safe } => format!("safety {{{}}}", names(safe)),
        Objective::Buchi { rec } => format!("buchi {{{}}}", names(rec)),
        Objective::CoBuchi { tail } => format!("cobuchi {{{}}}", names(tail)),
        Objective::Parity { priority } => {
            let entries: Vec<String> = priority
                .iter()
                .map(|(&s, &p)| format!("{}:{}", arena.name(s), p))
                .collect();
            format!("parity {{{}}}", entries.join(","))
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("bad generator parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub states: usize,
    pub players: u32,
    pub class: ObjectiveKind,
    pub edge_density: f64,
    pub seed: u64,
    /// Probability that an objective's state set is sampled empty.
    pub empty_set_rate: f64,
}

impl GenParams {
    pub fn new(states: usize, players: u32, class: ObjectiveKind, seed: u64) -> GenParams {
        GenParams {
            states,
            players,
            class,
            edge_density: 0.3,
            seed,
            empty_set_rate: 0.1,
        }
    }
}

/// Deterministic random game: every state gets one guaranteed successor
/// before density-driven extras, so the arena is deadlock-free by
/// construction.
pub fn gen_random(params: &GenParams) -> Result<String, GenError> {
    if params.states == 0 || params.states > 32 {
        return Err(GenError::BadParams("states must be in 1..=32".to_owned()));
    }
    if params.players == 0 || params.players > 8 {
        return Err(GenError::BadParams("players must be in 1..=8".to_owned()));
    }
    if !(0.0..=1.0).contains(&params.edge_density) {
        return Err(GenError::BadParams("density must be in [0, 1]".to_owned()));
    }
    if !(0.0..=1.0).contains(&params.empty_set_rate) {
        return Err(GenError::BadParams(
            "empty-set rate must be in [0, 1]".to_owned(),
        ));
    }

    let mut rng = SplitMix64::new(params.seed);
    let n = params.states;
    let name = |s: usize| format!("s{s}");

    let states: Vec<(String, u32)> = (0..n)
        .map(|s| (name(s), 1 + rng.below(params.players as u64) as u32))
        .collect();
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in 0..n {
        edge_set.insert((s, rng.below(n as u64) as usize));
    }
    let density_permille = (params.edge_density * 1000.0) as u64;
    for s in 0..n {
        for d in 0..n {
            if !edge_set.contains(&(s, d)) && rng.chance(density_permille, 1000) {
                edge_set.insert((s, d));
            }
        }
    }
    let initial = rng.below(n as u64) as usize;

    let empty_permille = (params.empty_set_rate * 1000.0) as u64;
    let sample_set = |rng: &mut SplitMix64| -> BTreeSet<StateIdx> {
        if rng.chance(empty_permille, 1000) {
            return BTreeSet::new();
        }
        let mask = 1 + rng.below((1u64 << n) - 1);
        (0..n).filter(|s| mask & (1 << s) != 0).collect()
    };
    let max_pri = (2 * n).min(5) as u64;
    let objectives: Vec<Objective> = (0..params.players)
        .map(|_| match params.class {
            ObjectiveKind::Reachability => Objective::Reachability {
                target: sample_set(&mut rng),
            },
            ObjectiveKind::Safety => Objective::Safety {
                safe: sample_set(&mut rng),
            },
            ObjectiveKind::Buchi => Objective::Buchi {
                rec: sample_set(&mut rng),
            },
            ObjectiveKind::CoBuchi => Objective::CoBuchi {
                tail: sample_set(&mut rng),
            },
            ObjectiveKind::Parity => Objective::Parity {
                priority: (0..n).map(|s| (s, rng.below(max_pri + 1) as u32)).collect(),
            },
        })
        .collect();

    let raw = RawArena {
        player_count: params.players,
        states,
        edges: edge_set.iter().map(|&(s, d)| (name(s), name(d))).collect(),
        initial: name(initial),
    };
    let arena = validate_arena(&raw).expect("generated arenas are valid by construction");
    // generated state names sort in index order only up to 10 states; the
    // objectives are index-based either way, so remap through the arena
    let profile = ObjectiveProfile::new(remap_objectives(&arena, &raw, objectives));
    profile
        .validate(&arena)
        .expect("generated objectives are valid");
    Ok(serialize_game(
        &format!("r{}", params.seed),
        &arena,
        &profile,
    ))
}

/// Generated objectives index states by generation order; the validated arena
/// reindexes by name. Translate index sets through the name mapping.
fn remap_objectives(arena: &Arena, raw: &RawArena, objectives: Vec<Objective>) -> Vec<Objective> {
    let to_arena: Vec<StateIdx> = raw
        .states
        .iter()
        .map(|(name, _)| arena.index_of(name).expect("state exists"))
        .collect();
    let remap_set = |set: BTreeSet<StateIdx>| -> BTreeSet<StateIdx> {
        set.into_iter().map(|s| to_arena[s]).collect()
    };
    objectives
        .into_iter()
        .map(|obj| match obj {
            Objective::Reachability { target } => Objective::Reachability {
                target: remap_set(target),
            },
            Objective::Safety { safe } => Objective::Safety {
                safe: remap_set(safe),
            },
            Objective::Buchi { rec } => Objective::Buchi {
                rec: remap_set(rec),
            },
            Objective::CoBuchi { tail } => Objective::CoBuchi {
                tail: remap_set(tail),
            },
            Objective::Parity { priority } => Objective::Parity {
                priority: priority
                    .into_iter()
                    .map(|(s, p)| (to_arena[s], p))
                    .collect(),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::decide_doomsday;

    const G1_TEXT: &str = "players 1\nstate a owner=1\nedge a a\ninit a\nobjective 1 buchi a\n";

    const G2_TEXT: &str = "\
game g2
players 2
state v owner=2
state t owner=1
state d owner=1
edge v t
edge v d
edge t t
edge d d
init v
objective 1 reach t
objective 2 reach v
";

    #[test]
    fn parses_g1() {
        let (arena, profile) = parse_game_file(G1_TEXT).unwrap();
        assert_eq!(arena.state_count(), 1);
        assert_eq!(profile.len(), 1);
    }

    #[test]
    fn parses_g2_and_round_trips() {
        let (arena, profile) = parse_game_file(G2_TEXT).unwrap();
        assert_eq!(arena.player_count(), 2);
        let text = serialize_game("g2", &arena, &profile);
        let (arena2, profile2) = parse_game_file(&text).unwrap();
        assert_eq!(arena, arena2);
        assert_eq!(profile, profile2);
    }

    #[test]
    fn partial_parity_maps_are_rejected() {
        let text = "players 1\nstate a owner=1\nstate b owner=1\nedge a b\nedge b a\ninit a\nobjective 1 parity a:0\n";
        let err = parse_game_file(text).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }), "{err}");
    }

    #[test]
    fn duplicate_and_missing_objectives_are_rejected() {
        let text = format!("{G1_TEXT}objective 1 reach a\n");
        assert_eq!(
            parse_game_file(&text).unwrap_err(),
            ParseError::DuplicateObjective(1)
        );
        let text = "players 2\nstate a owner=1\nedge a a\ninit a\nobjective 1 buchi a\n";
        assert_eq!(
            parse_game_file(text).unwrap_err(),
            ParseError::MissingObjective(2)
        );
    }

    #[test]
    fn result_json_shapes() {
        let (arena, profile) = parse_game_file(G1_TEXT).unwrap();
        let verdict = decide_doomsday(&arena, &profile).unwrap();
        let json = serialize_result(&arena, &verdict);
        assert!(json.starts_with("{\"verdict\":\"exists\",\"players\":1,\"certificate\":"));
        assert!(json.contains("\"stem\":[\"a\"]"));
        assert!(json.contains("\"cycle\":[\"a\"]"));

        let (arena, profile) = parse_game_file(G2_TEXT).unwrap();
        let verdict = decide_doomsday(&arena, &profile).unwrap();
        assert_eq!(
            serialize_result(&arena, &verdict),
            "{\"verdict\":\"not_exists\",\"players\":2}\n"
        );
    }

    #[test]
    fn certificate_json_round_trips() {
        let text = G2_TEXT.replace("objective 2 reach v", "objective 2 reach t");
        let (arena, profile) = parse_game_file(&text).unwrap();
        let verdict = decide_doomsday(&arena, &profile).unwrap();
        let crate::solver::Verdict::Exists(cert) = &verdict else {
            panic!("shared-target variant has an equilibrium");
        };
        let json = serialize_result(&arena, &verdict);
        let parsed = parse_certificate_json(&json, &arena, &profile).unwrap();
        assert_eq!(parsed, **cert);
    }

    #[test]
    fn dot_output_is_stable_and_highlights() {
        let text = G2_TEXT.replace("objective 2 reach v", "objective 2 reach t");
        let (arena, profile) = parse_game_file(&text).unwrap();
        let verdict = decide_doomsday(&arena, &profile).unwrap();
        let crate::solver::Verdict::Exists(cert) = verdict else {
            panic!();
        };
        let dot1 = export_dot(&arena, &profile, Some(&cert));
        let dot2 = export_dot(&arena, &profile, Some(&cert));
        assert_eq!(dot1, dot2);
        assert!(dot1.contains("\"v\" -> \"t\" [style=bold, color=red];"));
        assert!(dot1.contains("shape=box"));
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let params = GenParams::new(5, 2, ObjectiveKind::Reachability, 1);
        let a = gen_random(&params).unwrap();
        let b = gen_random(&params).unwrap();
        assert_eq!(a, b);
        let (arena, profile) = parse_game_file(&a).unwrap();
        assert_eq!(arena.state_count(), 5);
        assert_eq!(profile.len(), 2);
    }

    #[test]
    fn generator_survives_a_thousand_seeds() {
        for seed in 0..1000 {
            let class = ObjectiveKind::ALL[(seed % 5) as usize];
            let params =
                GenParams::new(1 + (seed as usize % 6), 1 + (seed % 3) as u32, class, seed);
            let text = gen_random(&params).unwrap();
            parse_game_file(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn generator_rejects_bad_params() {
        let params = GenParams::new(0, 2, ObjectiveKind::Safety, 1);
        assert!(matches!(gen_random(&params), Err(GenError::BadParams(_))));
    }
}
