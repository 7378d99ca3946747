//! The doomsday-equilibrium decision procedure.
//!
//! A doomsday equilibrium exists iff some play from the initial state
//! satisfies every objective while every unilateral off-path deviation, at
//! every position, lands inside the deviating victim's retaliation region.
//! The tracked product synchronizes the arena with the conjunction automaton
//! (does the main play satisfy everyone?) and with each player's retaliation
//! automaton (which zero-sum node would a deviation land on?). The witness
//! search restricts the product to permitted edges and looks for a reachable
//! cycle whose minimum conjunction priority is even, returning the
//! lexicographically least lasso so certificates are reproducible.

use std::collections::BTreeMap;
use std::collections::HashMap;

use thiserror::Error;

use crate::arena::{Arena, PlayerId, StateIdx};
use crate::automata::{dpa_conj_capped, AutomatonError, Dpa};
use crate::objectives::{compile_objective_to_dpa, ObjectiveKind, ObjectiveProfile};
use crate::zerosum::{retaliation_region, RegionError, RetaliationRegion, ZielonkaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("state budget exceeded ({0} nodes)")]
    SizeLimit(usize),
    #[error(transparent)]
    Recursion(#[from] ZielonkaError),
}

fn lift_automaton(e: AutomatonError) -> SolveError {
    match e {
        AutomatonError::SizeLimit(n) => SolveError::SizeLimit(n),
        other => unreachable!("internal automaton construction failed: {other}"),
    }
}

impl From<RegionError> for SolveError {
    fn from(e: RegionError) -> SolveError {
        match e {
            RegionError::Automaton(a) => lift_automaton(a),
            RegionError::Zielonka(z) => SolveError::Recursion(z),
        }
    }
}

/// Resource guards for the decision pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Budget for every materialized product (automata, games, tracked
    /// product).
    pub max_product_nodes: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_product_nodes: 1_000_000,
        }
    }
}

/// One node of the tracked product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductNode {
    pub arena_state: StateIdx,
    /// State of the conjunction automaton over all objectives.
    pub all_state: usize,
    /// State of each player's retaliation automaton, index = player index.
    pub retal: Vec<usize>,
}

/// Reachable synchronized product of the arena, the conjunction automaton and
/// every retaliation automaton. Automaton components hold the state after
/// reading the play up to and including the node's arena state.
#[derive(Debug, Clone)]
pub struct TrackedProduct {
    pub nodes: Vec<ProductNode>,
    /// Product successors in ascending arena-successor order.
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
    pub all_dpa: Dpa,
}

/// Builds the reachable tracked product, materializing at most
/// `limits.max_product_nodes` nodes.
pub fn tracked_product(
    arena: &Arena,
    all_dpa: &Dpa,
    regions: &[RetaliationRegion],
    limits: &Limits,
) -> Result<TrackedProduct, SolveError> {
    let v0 = arena.initial();
    let init = ProductNode {
        arena_state: v0,
        all_state: all_dpa.delta[all_dpa.initial][v0],
        retal: regions
            .iter()
            .map(|r| r.dpa.delta[r.dpa.initial][v0])
            .collect(),
    };
    let mut index: HashMap<ProductNode, usize> = HashMap::new();
    let mut nodes = vec![init.clone()];
    index.insert(init, 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < nodes.len() {
        let node = nodes[head].clone();
        let mut row = Vec::new();
        for &w in arena.successors(node.arena_state) {
            let next = ProductNode {
                arena_state: w,
                all_state: all_dpa.delta[node.all_state][w],
                retal: node
                    .retal
                    .iter()
                    .zip(regions)
                    .map(|(&q, r)| r.dpa.delta[q][w])
                    .collect(),
            };
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    if id >= limits.max_product_nodes {
                        return Err(SolveError::SizeLimit(limits.max_product_nodes));
                    }
                    index.insert(next.clone(), id);
                    nodes.push(next);
                    id
                }
            };
            row.push(id);
        }
        succ.push(row);
        head += 1;
    }
    Ok(TrackedProduct {
        nodes,
        succ,
        initial: 0,
        all_dpa: all_dpa.clone(),
    })
}

/// A main-play edge is permitted iff every unilateral deviation off it can be
/// punished: for every player other than the owner of the current state,
/// every off-path successor lands inside that player's retaliation region.
/// The prescribed successor itself is exempt.
pub fn permitted_edge(
    arena: &Arena,
    node: &ProductNode,
    target: StateIdx,
    regions: &[RetaliationRegion],
) -> bool {
    let owner = arena.owner(node.arena_state);
    for region in regions {
        if region.player == owner {
            continue;
        }
        let q = node.retal[region.player.index()];
        for &w in arena.successors(node.arena_state) {
            if w == target {
                continue;
            }
            if !region.wins(w, region.dpa.delta[q][w]) {
                return false;
            }
        }
    }
    true
}

/// Witness certificate: the main lasso through the tracked product plus each
/// player's positional retaliation strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Nonempty; starts at the product's initial node.
    pub stem: Vec<ProductNode>,
    /// Nonempty; follows product edges and closes back on itself.
    pub cycle: Vec<ProductNode>,
    /// Per player: (arena state, retaliation automaton state) -> prescribed
    /// arena successor, on the player-owned winning nodes.
    pub retaliation: Vec<BTreeMap<(StateIdx, usize), StateIdx>>,
    pub player_count: u32,
    pub objective_kinds: Vec<ObjectiveKind>,
}

impl Certificate {
    pub fn stem_names<'a>(&self, arena: &'a Arena) -> Vec<&'a str> {
        self.stem
            .iter()
            .map(|n| arena.name(n.arena_state))
            .collect()
    }

    pub fn cycle_names<'a>(&self, arena: &'a Arena) -> Vec<&'a str> {
        self.cycle
            .iter()
            .map(|n| arena.name(n.arena_state))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Exists(Box<Certificate>),
    NotExists,
}

/// Sort key making lasso comparisons deterministic: arena state first (its
/// index order is name order), then automaton components.
fn node_key(n: &ProductNode) -> Vec<usize> {
    let mut key = Vec::with_capacity(2 + n.retal.len());
    key.push(n.arena_state);
    key.push(n.all_state);
    key.extend_from_slice(&n.retal);
    key
}

struct Lasso {
    stem: Vec<usize>,
    cycle: Vec<usize>,
}

/// Comparison key realizing "stem shortest first, then lexicographic".
type LassoKey = (usize, Vec<Vec<usize>>, usize, Vec<Vec<usize>>);

impl Lasso {
    fn key(&self, tp: &TrackedProduct) -> LassoKey {
        (
            self.stem.len(),
            self.stem.iter().map(|&n| node_key(&tp.nodes[n])).collect(),
            self.cycle.len(),
            self.cycle.iter().map(|&n| node_key(&tp.nodes[n])).collect(),
        )
    }
}

/// Shortest, then lexicographically least path `from -> to` over `succ`
/// restricted to `allowed`, as a node sequence including both endpoints.
/// A `to == from` request searches for a nonempty cycle.
fn canonical_path(
    tp: &TrackedProduct,
    succ: &[Vec<usize>],
    allowed: &[bool],
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    let n = succ.len();
    // distance-to-target over reversed edges
    let mut dist = vec![usize::MAX; n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, row) in succ.iter().enumerate() {
        if !allowed[u] {
            continue;
        }
        for &w in row {
            if allowed[w] {
                pred[w].push(u);
            }
        }
    }
    let mut queue = std::collections::VecDeque::new();
    dist[to] = 0;
    queue.push_back(to);
    while let Some(x) = queue.pop_front() {
        for &u in &pred[x] {
            if dist[u] == usize::MAX {
                dist[u] = dist[x] + 1;
                queue.push_back(u);
            }
        }
    }
    let first_hop = |v: usize, remaining: usize| -> Option<usize> {
        succ[v]
            .iter()
            .copied()
            .filter(|&w| allowed[w] && dist[w] != usize::MAX && dist[w] + 1 == remaining)
            .min_by_key(|&w| node_key(&tp.nodes[w]))
    };
    let total = if from == to {
        // shortest nonempty cycle: one hop plus the way back
        succ[from]
            .iter()
            .copied()
            .filter(|&w| allowed[w] && dist[w] != usize::MAX)
            .map(|w| dist[w] + 1)
            .min()?
    } else {
        if !allowed[from] || dist[from] == usize::MAX {
            return None;
        }
        dist[from]
    };
    let mut path = vec![from];
    let mut cur = from;
    let mut remaining = total;
    while remaining > 0 {
        let w = first_hop(cur, remaining).expect("distance labels admit a hop");
        if remaining == 1 {
            // w == to; a cycle closes implicitly, a path includes its target
            if from != to {
                path.push(w);
            }
            break;
        }
        path.push(w);
        cur = w;
        remaining -= 1;
    }
    Some(path)
}

/// Searches the permitted subgraph for a reachable cycle with even minimum
/// conjunction priority, per even priority value ascending; returns the least
/// lasso under (stem length, stem, cycle length, cycle) order, or None.
pub fn witness_search(
    arena: &Arena,
    tp: &TrackedProduct,
    regions: &[RetaliationRegion],
) -> Option<Certificate> {
    let n = tp.nodes.len();
    let psucc: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            tp.succ[u]
                .iter()
                .copied()
                .filter(|&w| permitted_edge(arena, &tp.nodes[u], tp.nodes[w].arena_state, regions))
                .collect()
        })
        .collect();

    // reachable via permitted edges
    let mut reach = vec![false; n];
    let mut stack = vec![tp.initial];
    reach[tp.initial] = true;
    while let Some(u) = stack.pop() {
        for &w in &psucc[u] {
            if !reach[w] {
                reach[w] = true;
                stack.push(w);
            }
        }
    }

    let pri = |u: usize| tp.all_dpa.priority[tp.nodes[u].all_state];
    let mut evens: Vec<u32> = (0..n)
        .filter(|&u| reach[u])
        .map(pri)
        .filter(|p| p % 2 == 0)
        .collect();
    evens.sort_unstable();
    evens.dedup();

    let mut best: Option<(Lasso, LassoKey)> = None;
    for &d in &evens {
        let allowed: Vec<bool> = (0..n).map(|u| reach[u] && pri(u) >= d).collect();
        let mut anchors: Vec<usize> = (0..n).filter(|&u| allowed[u] && pri(u) == d).collect();
        anchors.sort_by_key(|&u| node_key(&tp.nodes[u]));
        for &anchor in &anchors {
            let Some(cyc) = canonical_path(tp, &psucc, &allowed, anchor, anchor) else {
                continue;
            };
            let path = if anchor == tp.initial {
                vec![anchor]
            } else {
                canonical_path(tp, &psucc, &reach, tp.initial, anchor).expect("anchor is reachable")
            };
            // normalize to a nonempty stem starting at the initial node
            let (stem, cycle) = if path.len() >= 2 {
                (path[..path.len() - 1].to_vec(), cyc)
            } else {
                let mut rotated = cyc[1..].to_vec();
                rotated.push(anchor);
                (vec![anchor], rotated)
            };
            let lasso = Lasso { stem, cycle };
            let key = lasso.key(tp);
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                best = Some((lasso, key));
            }
        }
    }

    let (lasso, _) = best?;
    Some(Certificate {
        stem: lasso.stem.iter().map(|&u| tp.nodes[u].clone()).collect(),
        cycle: lasso.cycle.iter().map(|&u| tp.nodes[u].clone()).collect(),
        retaliation: regions.iter().map(strategy_map).collect(),
        player_count: regions.len() as u32,
        objective_kinds: Vec::new(),
    })
}

fn strategy_map(region: &RetaliationRegion) -> BTreeMap<(StateIdx, usize), StateIdx> {
    let q_count = region.q_count();
    let mut map = BTreeMap::new();
    for node in 0..region.winning_mask().len() {
        let (v, q) = (node / q_count, node % q_count);
        if let Some((w, _)) = region.choice(v, q) {
            map.insert((v, q), w);
        }
    }
    map
}

/// Decides whether the game admits a doomsday equilibrium.
pub fn decide_doomsday(arena: &Arena, profile: &ObjectiveProfile) -> Result<Verdict, SolveError> {
    decide_doomsday_with_limits(arena, profile, &Limits::default())
}

pub fn decide_doomsday_with_limits(
    arena: &Arena,
    profile: &ObjectiveProfile,
    limits: &Limits,
) -> Result<Verdict, SolveError> {
    profile
        .validate(arena)
        .expect("objective profile must be valid for the arena");
    let cap = limits.max_product_nodes;

    let regions: Vec<RetaliationRegion> = (1..=arena.player_count())
        .map(|i| retaliation_region(arena, profile, PlayerId(i), cap))
        .collect::<Result<_, _>>()?;

    let phi_dpas: Vec<Dpa> = profile
        .iter()
        .map(|obj| compile_objective_to_dpa(arena, obj))
        .collect();
    let refs: Vec<&Dpa> = phi_dpas.iter().collect();
    let all_dpa = dpa_conj_capped(&refs, cap).map_err(lift_automaton)?;

    let tp = tracked_product(arena, &all_dpa, &regions, limits)?;
    match witness_search(arena, &tp, &regions) {
        Some(mut cert) => {
            cert.objective_kinds = profile.kinds();
            Ok(Verdict::Exists(Box::new(cert)))
        }
        None => Ok(Verdict::NotExists),
    }
}
