//! Definition-level ground truth for doomsday equilibria.
//!
//! Strategy profiles are finite-memory machines; the checker tests the two
//! equilibrium conditions directly: the closed outcome satisfies everyone,
//! and for every player the one-player graph fixed by that player's machine
//! admits no play violating the player while satisfying someone else. The
//! emptiness search here is a standalone even-cycle scan: this module never
//! touches the attractor or Zielonka code, so a solver bug cannot hide
//! behind a correlated checker bug.
//!
//! The bounded oracle enumerates machine profiles up to a memory bound in a
//! canonical order and returns the first profile passing the checker. Its
//! answers are definition-level: `NoneWithinBound` bounds memory, it is not a
//! proof of non-existence.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::arena::{Arena, PlayerId, StateIdx};
use crate::automata::{dpa_complement, dpa_conj_capped, Dpa};
use crate::objectives::{
    compile_expr, compile_objective_to_dpa, play_satisfies, retaliation_objective, Objective,
    ObjectiveProfile,
};
use crate::solver::Certificate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("oracle enumeration exceeded the budget ({0})")]
    BudgetExceeded(usize),
}

/// Finite-memory strategy: memory updates on every observed state (the
/// initial state included), the move choice reads the post-update memory at
/// owned states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyMachine {
    pub player: PlayerId,
    pub memory_count: usize,
    pub initial_memory: usize,
    /// `update[memory][state] -> memory`.
    pub update: Vec<Vec<usize>>,
    /// `choice[memory][state] -> successor`, meaningful at owned states.
    pub choice: Vec<Vec<Option<StateIdx>>>,
}

impl StrategyMachine {
    fn assert_valid(&self, arena: &Arena) {
        assert!(self.initial_memory < self.memory_count);
        assert_eq!(self.update.len(), self.memory_count);
        assert_eq!(self.choice.len(), self.memory_count);
        for row in &self.update {
            assert_eq!(row.len(), arena.state_count());
            assert!(row.iter().all(|&m| m < self.memory_count));
        }
        for row in &self.choice {
            assert_eq!(row.len(), arena.state_count());
            for (v, entry) in row.iter().enumerate() {
                if arena.owner(v) == self.player {
                    let w = entry.expect("owned states need a choice");
                    assert!(arena.has_edge(v, w), "choice must follow an arena edge");
                }
            }
        }
    }

    fn advance(&self, memory: usize, state: StateIdx) -> usize {
        self.update[memory][state]
    }

    fn pick(&self, memory: usize, state: StateIdx) -> StateIdx {
        self.choice[memory][state].expect("owned state has a choice")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    pub machines: Vec<StrategyMachine>,
}

/// Outcome of the closed profile: the unique play as a lasso of arena states.
pub fn profile_outcome(
    arena: &Arena,
    machines: &[StrategyMachine],
) -> (Vec<StateIdx>, Vec<StateIdx>) {
    let mut v = arena.initial();
    let mut mems: Vec<usize> = machines
        .iter()
        .map(|m| m.advance(m.initial_memory, v))
        .collect();
    let mut trajectory = vec![v];
    let mut seen: HashMap<(StateIdx, Vec<usize>), usize> = HashMap::new();
    seen.insert((v, mems.clone()), 0);
    loop {
        let owner = arena.owner(v);
        let machine = &machines[owner.index()];
        let w = machine.pick(mems[owner.index()], v);
        assert!(arena.has_edge(v, w), "machine choice must be an edge");
        for (m, machine) in mems.iter_mut().zip(machines) {
            *m = machine.advance(*m, w);
        }
        v = w;
        if let Some(&at) = seen.get(&(v, mems.clone())) {
            let cycle = trajectory.split_off(at);
            return (trajectory, cycle);
        }
        seen.insert((v, mems.clone()), trajectory.len());
        trajectory.push(v);
    }
}

/// Reachable behavior graph of one machine: nodes are (memory, state) pairs
/// with the owner's moves forced and everything else branching freely.
/// Returns (nodes in discovery order, successor lists, initial node).
fn behavior_graph(
    arena: &Arena,
    machine: &StrategyMachine,
) -> (Vec<(usize, StateIdx)>, Vec<Vec<usize>>, usize) {
    let v0 = arena.initial();
    let start = (machine.advance(machine.initial_memory, v0), v0);
    let mut index: HashMap<(usize, StateIdx), usize> = HashMap::new();
    let mut nodes = vec![start];
    index.insert(start, 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < nodes.len() {
        let (m, v) = nodes[head];
        let targets: Vec<StateIdx> = if arena.owner(v) == machine.player {
            vec![machine.pick(m, v)]
        } else {
            arena.successors(v).to_vec()
        };
        let mut row = Vec::with_capacity(targets.len());
        for w in targets {
            let next = (machine.advance(m, w), w);
            let id = *index.entry(next).or_insert_with(|| {
                nodes.push(next);
                nodes.len() - 1
            });
            row.push(id);
        }
        succ.push(row);
        head += 1;
    }
    (nodes, succ, 0)
}

/// Standalone even-cycle scan: a reachable cycle whose minimum priority is
/// even, as (stem, cycle) node sequences with the stem possibly empty.
/// Independent of the parity-game machinery by design.
fn even_min_cycle(
    succ: &[Vec<usize>],
    priority: &[u32],
    init: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = succ.len();
    let mut reach = vec![false; n];
    let mut stack = vec![init];
    reach[init] = true;
    while let Some(u) = stack.pop() {
        for &w in &succ[u] {
            if !reach[w] {
                reach[w] = true;
                stack.push(w);
            }
        }
    }
    let mut evens: Vec<u32> = (0..n)
        .filter(|&u| reach[u])
        .map(|u| priority[u])
        .filter(|p| p % 2 == 0)
        .collect();
    evens.sort_unstable();
    evens.dedup();

    for d in evens {
        let allowed: Vec<bool> = (0..n).map(|u| reach[u] && priority[u] >= d).collect();
        for anchor in (0..n).filter(|&u| allowed[u] && priority[u] == d) {
            // BFS from the anchor's successors back to the anchor, inside `allowed`
            let mut parent: Vec<Option<usize>> = vec![None; n];
            let mut queue = std::collections::VecDeque::new();
            let mut hit = None;
            'outer: for &w in &succ[anchor] {
                if !allowed[w] {
                    continue;
                }
                if w == anchor {
                    hit = Some(anchor);
                    break 'outer;
                }
                if parent[w].is_none() {
                    parent[w] = Some(anchor);
                    queue.push_back(w);
                }
            }
            while hit.is_none() {
                let Some(u) = queue.pop_front() else { break };
                for &w in &succ[u] {
                    if w == anchor {
                        hit = Some(u);
                        break;
                    }
                    if allowed[w] && parent[w].is_none() {
                        parent[w] = Some(u);
                        queue.push_back(w);
                    }
                }
            }
            let Some(last) = hit else { continue };
            // cycle = anchor .. last, closing edge last -> anchor
            let mut cycle = vec![];
            let mut cur = last;
            while cur != anchor {
                cycle.push(cur);
                cur = parent[cur].expect("parents reach back to the anchor");
            }
            cycle.push(anchor);
            cycle.reverse();
            // stem = init .. pre-anchor
            let stem = if anchor == init {
                Vec::new()
            } else {
                let mut parent: Vec<Option<usize>> = vec![None; n];
                let mut queue = std::collections::VecDeque::new();
                queue.push_back(init);
                'bfs: while let Some(u) = queue.pop_front() {
                    for &w in &succ[u] {
                        if w == anchor {
                            parent[anchor] = Some(u);
                            break 'bfs;
                        }
                        if reach[w] && parent[w].is_none() && w != init {
                            parent[w] = Some(u);
                            queue.push_back(w);
                        }
                    }
                }
                let mut path = vec![];
                let mut cur = parent[anchor].expect("anchor is reachable");
                while cur != init {
                    path.push(cur);
                    cur = parent[cur].expect("parents reach back to the start");
                }
                path.push(init);
                path.reverse();
                path
            };
            return Some((stem, cycle));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// The player whose objective fails (condition 1) or is deviated against
    /// (condition 2).
    pub victim: PlayerId,
    /// For condition-2 violations, a player whose objective survives the
    /// deviation.
    pub beneficiary: Option<PlayerId>,
    pub stem: Vec<StateIdx>,
    pub cycle: Vec<StateIdx>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub is_de: bool,
    pub violation: Option<Violation>,
}

/// Condition 2 for one machine: no play consistent with it may violate the
/// owner while satisfying `j`, for any listed `(j, automaton of !phi_i and
/// phi_j)`. Returns the first violation found.
fn condition2_violation(
    arena: &Arena,
    machine: &StrategyMachine,
    tests: &[(PlayerId, &Dpa)],
) -> Option<Violation> {
    let (nodes, succ, init) = behavior_graph(arena, machine);
    for &(j, dpa) in tests {
        // product of the behavior graph with the automaton
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let start = (init, dpa.delta[dpa.initial][nodes[init].1]);
        let mut pnodes = vec![start];
        index.insert(start, 0);
        let mut psucc: Vec<Vec<usize>> = Vec::new();
        let mut head = 0;
        while head < pnodes.len() {
            let (g, q) = pnodes[head];
            let mut row = Vec::new();
            for &g2 in &succ[g] {
                let next = (g2, dpa.delta[q][nodes[g2].1]);
                let id = *index.entry(next).or_insert_with(|| {
                    pnodes.push(next);
                    pnodes.len() - 1
                });
                row.push(id);
            }
            psucc.push(row);
            head += 1;
        }
        let priority: Vec<u32> = pnodes.iter().map(|&(_, q)| dpa.priority[q]).collect();
        if let Some((stem, cycle)) = even_min_cycle(&psucc, &priority, 0) {
            let project = |seq: &[usize]| -> Vec<StateIdx> {
                seq.iter().map(|&p| nodes[pnodes[p].0].1).collect()
            };
            return Some(Violation {
                victim: machine.player,
                beneficiary: Some(j),
                stem: project(&stem),
                cycle: project(&cycle),
            });
        }
    }
    None
}

fn deviation_test_dpas(
    arena: &Arena,
    profile: &ObjectiveProfile,
    i: PlayerId,
) -> Vec<(PlayerId, Dpa)> {
    let not_own = dpa_complement(&compile_objective_to_dpa(arena, profile.of(i)));
    (1..=profile.len() as u32)
        .map(PlayerId)
        .filter(|&j| j != i)
        .map(|j| {
            let other = compile_objective_to_dpa(arena, profile.of(j));
            let dpa = dpa_conj_capped(&[&not_own, &other], usize::MAX)
                .expect("two-automaton product at desk scale");
            (j, dpa)
        })
        .collect()
}

/// Tests the two equilibrium conditions straight from the definition.
pub fn check_profile(
    arena: &Arena,
    profile: &ObjectiveProfile,
    lambda: &StrategyProfile,
) -> CheckReport {
    assert_eq!(lambda.machines.len(), arena.player_count() as usize);
    for (k, machine) in lambda.machines.iter().enumerate() {
        assert_eq!(machine.player, PlayerId(k as u32 + 1));
        machine.assert_valid(arena);
    }

    // Condition 1: the closed outcome satisfies every objective.
    let (stem, cycle) = profile_outcome(arena, &lambda.machines);
    for (k, obj) in profile.iter().enumerate() {
        if !play_satisfies(arena, obj, &stem, &cycle).expect("outcome is a play") {
            return CheckReport {
                is_de: false,
                violation: Some(Violation {
                    victim: PlayerId(k as u32 + 1),
                    beneficiary: None,
                    stem,
                    cycle,
                }),
            };
        }
    }

    // Condition 2, per player with every other player as beneficiary.
    for machine in &lambda.machines {
        let tests = deviation_test_dpas(arena, profile, machine.player);
        let refs: Vec<(PlayerId, &Dpa)> = tests.iter().map(|(j, d)| (*j, d)).collect();
        if let Some(violation) = condition2_violation(arena, machine, &refs) {
            return CheckReport {
                is_de: false,
                violation: Some(violation),
            };
        }
    }

    CheckReport {
        is_de: true,
        violation: None,
    }
}

/// Turns a solver certificate into concrete strategy machines: follow the
/// main lasso, switch to the retaliation strategy on observed divergence,
/// fall back to the least successor outside the winning region.
pub fn assemble_profile(
    cert: &Certificate,
    arena: &Arena,
    profile: &ObjectiveProfile,
) -> Result<StrategyProfile, VerifyError> {
    let malformed = |msg: &str| VerifyError::MalformedCertificate(msg.to_owned());
    let n = arena.player_count() as usize;
    if cert.player_count as usize != n || cert.retaliation.len() != n {
        return Err(malformed("player count mismatch"));
    }
    if cert.stem.is_empty() || cert.cycle.is_empty() {
        return Err(malformed("stem and cycle must be nonempty"));
    }
    if cert.stem[0].arena_state != arena.initial() {
        return Err(malformed("stem must start at the initial state"));
    }

    let lasso: Vec<_> = cert.stem.iter().chain(&cert.cycle).collect();
    let total = lasso.len();
    let stem_len = cert.stem.len();
    let states: Vec<StateIdx> = lasso.iter().map(|p| p.arena_state).collect();
    for k in 0..total {
        let next = if k + 1 == total { stem_len } else { k + 1 };
        if !arena.has_edge(states[k], states[next]) {
            return Err(malformed("lasso does not follow arena edges"));
        }
    }

    // Recompile each retaliation automaton; the certificate's components and
    // strategy keys must be consistent with it.
    let dpas: Vec<Dpa> = (1..=n as u32)
        .map(|i| {
            compile_expr(
                arena,
                &retaliation_objective(PlayerId(i), profile),
                usize::MAX,
            )
            .expect("retaliation automaton at desk scale")
        })
        .collect();
    for (i, dpa) in dpas.iter().enumerate() {
        let mut q = dpa.delta[dpa.initial][states[0]];
        if lasso[0].retal.get(i) != Some(&q) {
            return Err(malformed("retaliation component mismatch at the start"));
        }
        for k in 1..total {
            q = dpa.delta[q][states[k]];
            if lasso[k].retal.get(i) != Some(&q) {
                return Err(malformed("retaliation component mismatch along the lasso"));
            }
        }
        if dpa.delta[q][states[stem_len]] != lasso[stem_len].retal[i] {
            return Err(malformed("lasso cycle does not close in the product"));
        }
        for (&(v, q), &w) in &cert.retaliation[i] {
            if v >= arena.state_count() || q >= dpa.state_count() || !arena.has_edge(v, w) {
                return Err(malformed("retaliation strategy entry is not an edge"));
            }
        }
    }

    // memory layout per machine: 0 = before the first observation,
    // 1 + p = main mode at lasso position p, 1 + total + q = retaliation
    // mode at automaton state q
    let next_pos = |p: usize| if p + 1 == total { stem_len } else { p + 1 };
    let machines = (0..n)
        .map(|idx| {
            let player = PlayerId(idx as u32 + 1);
            let dpa = &dpas[idx];
            let retal_of = |p: usize| lasso[p].retal[idx];
            let retal_mem = |q: usize| 1 + total + q;
            let memory_count = 1 + total + dpa.state_count();
            let mut update = vec![vec![0usize; arena.state_count()]; memory_count];
            let mut choice = vec![vec![None; arena.state_count()]; memory_count];

            for s in arena.states() {
                update[0][s] = if s == states[0] {
                    1
                } else {
                    retal_mem(dpa.delta[dpa.initial][s])
                };
            }
            for p in 0..total {
                for s in arena.states() {
                    update[1 + p][s] = if s == states[next_pos(p)] {
                        1 + next_pos(p)
                    } else {
                        retal_mem(dpa.delta[retal_of(p)][s])
                    };
                }
            }
            for q in 0..dpa.state_count() {
                for s in arena.states() {
                    update[retal_mem(q)][s] = retal_mem(dpa.delta[q][s]);
                }
            }

            for v in arena.states() {
                if arena.owner(v) != player {
                    continue;
                }
                let fallback = arena.successors(v)[0];
                choice[0][v] = Some(fallback);
                for p in 0..total {
                    choice[1 + p][v] = Some(if v == states[p] {
                        states[next_pos(p)]
                    } else {
                        fallback
                    });
                }
                for q in 0..dpa.state_count() {
                    choice[retal_mem(q)][v] = Some(
                        cert.retaliation[idx]
                            .get(&(v, q))
                            .copied()
                            .unwrap_or(fallback),
                    );
                }
            }

            StrategyMachine {
                player,
                memory_count,
                initial_memory: 0,
                update,
                choice,
            }
        })
        .collect();

    Ok(StrategyProfile { machines })
}

/// Does any lasso from the initial state satisfy `obj`? Projection of the
/// arena x automaton product through the even-cycle scan.
pub fn one_player_emptiness(
    arena: &Arena,
    obj: &Objective,
) -> Option<(Vec<StateIdx>, Vec<StateIdx>)> {
    let dpa = compile_objective_to_dpa(arena, obj);
    arena_dpa_lasso(arena, &dpa)
}

/// Does any lasso from the initial state satisfy every objective at once?
pub fn lasso_satisfying_all(
    arena: &Arena,
    profile: &ObjectiveProfile,
) -> Option<(Vec<StateIdx>, Vec<StateIdx>)> {
    let dpas: Vec<Dpa> = profile
        .iter()
        .map(|o| compile_objective_to_dpa(arena, o))
        .collect();
    let refs: Vec<&Dpa> = dpas.iter().collect();
    let all = dpa_conj_capped(&refs, usize::MAX).expect("conjunction at desk scale");
    arena_dpa_lasso(arena, &all)
}

fn arena_dpa_lasso(arena: &Arena, dpa: &Dpa) -> Option<(Vec<StateIdx>, Vec<StateIdx>)> {
    let v0 = arena.initial();
    let start = (v0, dpa.delta[dpa.initial][v0]);
    let mut index: HashMap<(StateIdx, usize), usize> = HashMap::new();
    let mut nodes = vec![start];
    index.insert(start, 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < nodes.len() {
        let (v, q) = nodes[head];
        let mut row = Vec::new();
        for &w in arena.successors(v) {
            let next = (w, dpa.delta[q][w]);
            let id = *index.entry(next).or_insert_with(|| {
                nodes.push(next);
                nodes.len() - 1
            });
            row.push(id);
        }
        succ.push(row);
        head += 1;
    }
    let priority: Vec<u32> = nodes.iter().map(|&(_, q)| dpa.priority[q]).collect();
    let (stem, cycle) = even_min_cycle(&succ, &priority, 0)?;
    let project = |seq: &[usize]| -> Vec<StateIdx> { seq.iter().map(|&p| nodes[p].0).collect() };
    Some((project(&stem), project(&cycle)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    FoundDe(StrategyProfile),
    /// No profile within the memory bound; not a proof of non-existence.
    NoneWithinBound,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    /// Machine candidates iterated per player.
    pub max_machines_per_player: usize,
    /// Joint outcome checks across the filtered profile space.
    pub max_profiles: usize,
}

impl Default for OracleBudget {
    fn default() -> OracleBudget {
        OracleBudget {
            max_machines_per_player: 20_000_000,
            max_profiles: 20_000_000,
        }
    }
}

/// Exhaustive search over strategy machines with at most `memory_bound`
/// memory states, returning the first profile (in canonical order) that
/// passes [`check_profile`].
///
/// The enumeration factors the checker: condition 2 depends on one machine
/// at a time and is memoized per behavior, condition 1 only on the joint
/// outcome. Machines that differ only outside their reachable behavior
/// collapse to their first representative.
pub fn oracle_decide_bounded(
    arena: &Arena,
    profile: &ObjectiveProfile,
    memory_bound: usize,
) -> Result<OracleOutcome, VerifyError> {
    oracle_decide_bounded_with_budget(arena, profile, memory_bound, &OracleBudget::default())
}

pub fn oracle_decide_bounded_with_budget(
    arena: &Arena,
    profile: &ObjectiveProfile,
    memory_bound: usize,
    budget: &OracleBudget,
) -> Result<OracleOutcome, VerifyError> {
    assert!(arena.state_count() <= 8, "oracle is for desk-scale arenas");
    assert!(arena.player_count() <= 3, "oracle is for at most 3 players");
    assert!(
        (1..=2).contains(&memory_bound),
        "memory bound must be 1 or 2"
    );

    // No lasso satisfies everyone: condition 1 is unachievable for any
    // profile of any memory.
    if lasso_satisfying_all(arena, profile).is_none() {
        return Ok(OracleOutcome::NoneWithinBound);
    }

    let mut candidates: Vec<Vec<StrategyMachine>> = Vec::new();
    for i in (1..=arena.player_count()).map(PlayerId) {
        let list = cond2_machines(arena, profile, i, memory_bound, budget)?;
        if list.is_empty() {
            return Ok(OracleOutcome::NoneWithinBound);
        }
        candidates.push(list);
    }

    // Player-major lexicographic combination, first passing outcome wins.
    let mut odometer = vec![0usize; candidates.len()];
    let mut checked = 0usize;
    loop {
        checked += 1;
        if checked > budget.max_profiles {
            return Err(VerifyError::BudgetExceeded(budget.max_profiles));
        }
        let machines: Vec<StrategyMachine> = odometer
            .iter()
            .zip(&candidates)
            .map(|(&k, list)| list[k].clone())
            .collect();
        let (stem, cycle) = profile_outcome(arena, &machines);
        let all_satisfied = profile
            .iter()
            .all(|obj| play_satisfies(arena, obj, &stem, &cycle).expect("outcome is a play"));
        if all_satisfied {
            let lambda = StrategyProfile { machines };
            let report = check_profile(arena, profile, &lambda);
            assert!(
                report.is_de,
                "oracle factorization must agree with the full checker"
            );
            return Ok(OracleOutcome::FoundDe(lambda));
        }
        // advance, last player fastest
        let mut pos = odometer.len();
        loop {
            if pos == 0 {
                return Ok(OracleOutcome::NoneWithinBound);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < candidates[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// Canonical form of a machine's reachable behavior: nodes renamed in BFS
/// discovery order, with the owner's choice and the memory transition per
/// arena letter. Reference implementation for [`BehaviorScratch::key`].
#[cfg(test)]
fn behavior_key(arena: &Arena, machine: &StrategyMachine) -> Vec<usize> {
    let (nodes, succ, _) = behavior_graph(arena, machine);
    let mut key = Vec::with_capacity(nodes.len() * 4);
    for ((_, v), row) in nodes.iter().zip(&succ) {
        key.push(*v);
        for &t in row {
            key.push(t + 1);
        }
        key.push(0);
    }
    key
}

/// Scratch machinery for enumerating behaviors without building full
/// machines: a flat BFS over (memory, state) pairs with choices read from
/// odometer digits.
struct BehaviorScratch {
    node_id: Vec<usize>,
    stamp: Vec<u64>,
    generation: u64,
    order: Vec<(usize, StateIdx)>,
}

impl BehaviorScratch {
    fn new(memory: usize, states: usize) -> BehaviorScratch {
        BehaviorScratch {
            node_id: vec![0; memory * states],
            stamp: vec![0; memory * states],
            generation: 0,
            order: Vec::with_capacity(memory * states),
        }
    }

    /// BFS key of the behavior defined by `update` plus the choice digits on
    /// `slots`; equals [`behavior_key`] of the materialized machine.
    fn key(
        &mut self,
        arena: &Arena,
        player: PlayerId,
        update: &[Vec<usize>],
        slot_of: &[Option<usize>],
        digits: &[usize],
    ) -> Vec<usize> {
        let states = arena.state_count();
        self.generation += 1;
        self.order.clear();
        let v0 = arena.initial();
        let start = (update[0][v0], v0);
        self.stamp[start.0 * states + start.1] = self.generation;
        self.node_id[start.0 * states + start.1] = 0;
        self.order.push(start);
        let mut key = Vec::with_capacity(self.node_id.len() * 4);
        let mut head = 0;
        while head < self.order.len() {
            let (m, v) = self.order[head];
            key.push(v);
            let targets: &[StateIdx] = if arena.owner(v) == player {
                let slot = slot_of[m * states + v].expect("owned reachable pair has a slot");
                &arena.successors(v)[digits[slot]..=digits[slot]]
            } else {
                arena.successors(v)
            };
            for &w in targets {
                let next = (update[m][w], w);
                let flat = next.0 * states + next.1;
                if self.stamp[flat] != self.generation {
                    self.stamp[flat] = self.generation;
                    self.node_id[flat] = self.order.len();
                    self.order.push(next);
                }
                key.push(self.node_id[flat] + 1);
            }
            key.push(0);
            head += 1;
        }
        key
    }
}

/// Enumerates machines for player `i` in canonical order (memory size, then
/// update table, then reachable choice entries; unreachable entries pinned to
/// the least successor), keeping the first representative of each behavior
/// that passes condition 2.
fn cond2_machines(
    arena: &Arena,
    profile: &ObjectiveProfile,
    i: PlayerId,
    memory_bound: usize,
    budget: &OracleBudget,
) -> Result<Vec<StrategyMachine>, VerifyError> {
    let v_count = arena.state_count();
    let tests = deviation_test_dpas(arena, profile, i);
    let test_refs: Vec<(PlayerId, &Dpa)> = tests.iter().map(|(j, d)| (*j, d)).collect();

    let mut seen_updates: HashSet<Vec<usize>> = HashSet::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut kept: Vec<StrategyMachine> = Vec::new();
    let mut iterated = 0usize;

    for memory in 1..=memory_bound {
        let mut scratch = BehaviorScratch::new(memory, v_count);
        // mixed-radix counter over update entries, (memory, state) row-major
        let entries = memory * v_count;
        let mut update_digits = vec![0usize; entries];
        'updates: loop {
            let update: Vec<Vec<usize>> = (0..memory)
                .map(|m| update_digits[m * v_count..(m + 1) * v_count].to_vec())
                .collect();

            // over-approximate reachable (memory, state) pairs, ignoring
            // ownership so the set is choice-independent
            let v0 = arena.initial();
            let mut reach: BTreeSet<(usize, StateIdx)> = BTreeSet::new();
            let mut stack = vec![(update[0][v0], v0)];
            while let Some((m, v)) = stack.pop() {
                if !reach.insert((m, v)) {
                    continue;
                }
                for &w in arena.successors(v) {
                    stack.push((update[m][w], w));
                }
            }
            // update tables that agree on every entry the reachable part can
            // read yield pairwise-identical behaviors; enumerate one block
            let mut signature = Vec::new();
            for &(m, v) in &reach {
                signature.push(m * v_count + v);
                for &w in arena.successors(v) {
                    signature.push(update[m][w]);
                }
            }
            if seen_updates.insert(signature) {
                let slots: Vec<(usize, StateIdx)> = reach
                    .iter()
                    .copied()
                    .filter(|&(_, v)| arena.owner(v) == i)
                    .collect();
                let mut slot_of: Vec<Option<usize>> = vec![None; memory * v_count];
                for (k, &(m, v)) in slots.iter().enumerate() {
                    slot_of[m * v_count + v] = Some(k);
                }

                let mut digits = vec![0usize; slots.len()];
                'choices: loop {
                    iterated += 1;
                    if iterated > budget.max_machines_per_player {
                        return Err(VerifyError::BudgetExceeded(budget.max_machines_per_player));
                    }
                    let key = scratch.key(arena, i, &update, &slot_of, &digits);
                    if seen.insert(key) {
                        let machine = materialize(arena, i, memory, &update, &slots, &digits);
                        if condition2_violation(arena, &machine, &test_refs).is_none() {
                            kept.push(machine);
                        }
                    }

                    // advance the choice odometer, last slot fastest
                    let mut pos = slots.len();
                    loop {
                        if pos == 0 {
                            break 'choices;
                        }
                        pos -= 1;
                        digits[pos] += 1;
                        if digits[pos] < arena.successors(slots[pos].1).len() {
                            continue 'choices;
                        }
                        digits[pos] = 0;
                    }
                }
            }

            // advance the update odometer, last entry fastest
            let mut pos = entries;
            loop {
                if pos == 0 {
                    break 'updates;
                }
                pos -= 1;
                update_digits[pos] += 1;
                if update_digits[pos] < memory {
                    continue 'updates;
                }
                update_digits[pos] = 0;
            }
        }
    }
    Ok(kept)
}

fn materialize(
    arena: &Arena,
    player: PlayerId,
    memory: usize,
    update: &[Vec<usize>],
    slots: &[(usize, StateIdx)],
    digits: &[usize],
) -> StrategyMachine {
    let v_count = arena.state_count();
    let mut choice: Vec<Vec<Option<StateIdx>>> = vec![vec![None; v_count]; memory];
    for row in choice.iter_mut() {
        for v in arena.states() {
            if arena.owner(v) == player {
                row[v] = Some(arena.successors(v)[0]);
            }
        }
    }
    for (slot, &digit) in slots.iter().zip(digits) {
        choice[slot.0][slot.1] = Some(arena.successors(slot.1)[digit]);
    }
    StrategyMachine {
        player,
        memory_count: memory,
        initial_memory: 0,
        update: update.to_vec(),
        choice,
    }
}
