//! Two-player zero-sum parity games: arena x DPA products, attractors,
//! Zielonka solving with positional strategies, and per-player retaliation
//! regions.
//!
//! The protagonist wins a play iff the minimum priority seen infinitely often
//! is even. In a retaliation game the protagonist is one player and the
//! antagonist is the merged coalition of everyone else, which matches the
//! deviation quantifier: only the threatened player's strategy stays fixed.

use thiserror::Error;

use crate::arena::{Arena, PlayerId, StateIdx};
use crate::automata::{AutomatonError, Dpa};
use crate::objectives::{compile_expr, retaliation_objective, ObjectiveProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Protagonist,
    Antagonist,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Protagonist => Role::Antagonist,
            Role::Antagonist => Role::Protagonist,
        }
    }

    fn of_priority(p: u32) -> Role {
        if p.is_multiple_of(2) {
            Role::Protagonist
        } else {
            Role::Antagonist
        }
    }
}

/// Finite parity game with total edge relation. Node indices are dense.
#[derive(Debug, Clone)]
pub struct ParityGame {
    role: Vec<Role>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    priority: Vec<u32>,
}

impl ParityGame {
    /// Builds a game, requiring every node to have at least one successor.
    pub fn new(role: Vec<Role>, succ: Vec<Vec<usize>>, priority: Vec<u32>) -> ParityGame {
        assert_eq!(role.len(), succ.len());
        assert_eq!(role.len(), priority.len());
        let n = role.len();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, list) in succ.iter().enumerate() {
            assert!(!list.is_empty(), "node {u} has no successor");
            for &v in list {
                assert!(v < n, "edge target {v} out of range");
                pred[v].push(u);
            }
        }
        ParityGame {
            role,
            succ,
            pred,
            priority,
        }
    }

    pub fn node_count(&self) -> usize {
        self.role.len()
    }

    pub fn role(&self, v: usize) -> Role {
        self.role[v]
    }

    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }
}

/// Least fixpoint of `target`, nodes from which `who` can force reaching it:
/// `who`-nodes with some successor inside, other nodes with all successors
/// inside.
pub fn attractor(pg: &ParityGame, who: Role, target: &[bool]) -> Vec<bool> {
    let alive = vec![true; pg.node_count()];
    attract_masked(pg, &alive, who, target).0
}

/// Attractor within `alive`, also returning the attraction edges chosen for
/// `who`-owned nodes pulled in from outside the target.
fn attract_masked(
    pg: &ParityGame,
    alive: &[bool],
    who: Role,
    target: &[bool],
) -> (Vec<bool>, Vec<(usize, usize)>) {
    let n = pg.node_count();
    let mut inside = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();
    for v in 0..n {
        if alive[v] && target[v] {
            inside[v] = true;
            queue.push(v);
        }
    }
    let mut remaining: Vec<usize> = (0..n)
        .map(|v| {
            if alive[v] {
                pg.succ[v].iter().filter(|&&w| alive[w]).count()
            } else {
                0
            }
        })
        .collect();
    let mut strategy = Vec::new();
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &u in &pg.pred[x] {
            if !alive[u] || inside[u] {
                continue;
            }
            if pg.role[u] == who {
                inside[u] = true;
                strategy.push((u, x));
                queue.push(u);
            } else {
                remaining[u] -= 1;
                if remaining[u] == 0 {
                    inside[u] = true;
                    queue.push(u);
                }
            }
        }
    }
    (inside, strategy)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZielonkaError {
    #[error("parity solving exceeded the recursion guard ({0})")]
    RecursionLimit(usize),
}

/// Winning partition and positional strategies. Strategies are defined
/// exactly on own nodes inside the own region.
#[derive(Debug, Clone)]
pub struct Solution {
    pub winner: Vec<Role>,
    pub strategy_p: Vec<Option<usize>>,
    pub strategy_a: Vec<Option<usize>>,
}

impl Solution {
    pub fn region(&self, who: Role) -> Vec<bool> {
        self.winner.iter().map(|&r| r == who).collect()
    }
}

struct Zielonka<'a> {
    pg: &'a ParityGame,
    strategy_p: Vec<Option<usize>>,
    strategy_a: Vec<Option<usize>>,
    depth_limit: usize,
    calls_left: usize,
}

impl Zielonka<'_> {
    fn strategy_of(&mut self, who: Role) -> &mut Vec<Option<usize>> {
        match who {
            Role::Protagonist => &mut self.strategy_p,
            Role::Antagonist => &mut self.strategy_a,
        }
    }

    /// Returns the protagonist-winning mask within `alive`.
    fn solve(&mut self, alive: Vec<bool>, depth: usize) -> Result<Vec<bool>, ZielonkaError> {
        if depth > self.depth_limit || self.calls_left == 0 {
            return Err(ZielonkaError::RecursionLimit(self.depth_limit));
        }
        self.calls_left -= 1;

        let n = self.pg.node_count();
        let d = match (0..n)
            .filter(|&v| alive[v])
            .map(|v| self.pg.priority[v])
            .min()
        {
            Some(d) => d,
            None => return Ok(vec![false; n]),
        };
        let who = Role::of_priority(d);
        let target: Vec<bool> = (0..n)
            .map(|v| alive[v] && self.pg.priority[v] == d)
            .collect();

        let (a_set, a_strat) = attract_masked(self.pg, &alive, who, &target);
        let sub1: Vec<bool> = (0..n).map(|v| alive[v] && !a_set[v]).collect();
        let w1p = self.solve(sub1.clone(), depth + 1)?;
        let opp_won_sub1 = (0..n).any(|v| {
            sub1[v]
                && match who {
                    Role::Protagonist => !w1p[v],
                    Role::Antagonist => w1p[v],
                }
        });

        if !opp_won_sub1 {
            // The whole subgame belongs to `who`: attractor edges toward the
            // minimal-priority set, any alive choice on that set itself.
            for (u, x) in a_strat {
                self.strategy_of(who)[u] = Some(x);
            }
            for (v, _) in target.iter().enumerate().filter(|&(_, &t)| t) {
                if self.pg.role[v] == who {
                    let pick = self.pg.succ[v].iter().copied().find(|&w| alive[w]);
                    self.strategy_of(who)[v] = Some(pick.expect("alive subgame is total"));
                }
            }
            return Ok(match who {
                Role::Protagonist => alive,
                Role::Antagonist => vec![false; n],
            });
        }

        let opp = who.other();
        let w1_opp: Vec<bool> = (0..n)
            .map(|v| {
                sub1[v]
                    && match who {
                        Role::Protagonist => !w1p[v],
                        Role::Antagonist => w1p[v],
                    }
            })
            .collect();
        let (b_set, b_strat) = attract_masked(self.pg, &alive, opp, &w1_opp);
        for (u, x) in b_strat {
            self.strategy_of(opp)[u] = Some(x);
        }
        let sub2: Vec<bool> = (0..n).map(|v| alive[v] && !b_set[v]).collect();
        let w2p = self.solve(sub2, depth + 1)?;
        Ok((0..n)
            .map(|v| match opp {
                Role::Protagonist => w2p[v] || b_set[v],
                Role::Antagonist => w2p[v],
            })
            .collect())
    }
}

pub fn zielonka_solve(pg: &ParityGame) -> Result<Solution, ZielonkaError> {
    zielonka_solve_with_limits(pg, 10_000, 5_000_000)
}

/// Recursive attractor decomposition. `depth_limit` and `call_limit` guard
/// against pathological input sizes.
pub fn zielonka_solve_with_limits(
    pg: &ParityGame,
    depth_limit: usize,
    call_limit: usize,
) -> Result<Solution, ZielonkaError> {
    let n = pg.node_count();
    let mut z = Zielonka {
        pg,
        strategy_p: vec![None; n],
        strategy_a: vec![None; n],
        depth_limit,
        calls_left: call_limit,
    };
    let winp = z.solve(vec![true; n], 0)?;
    let winner: Vec<Role> = (0..n)
        .map(|v| {
            if winp[v] {
                Role::Protagonist
            } else {
                Role::Antagonist
            }
        })
        .collect();
    // Strategies live exactly on own nodes inside the own region; recursion
    // may leave stale entries elsewhere.
    for (v, &won_by) in winner.iter().enumerate() {
        if !(won_by == Role::Protagonist && pg.role[v] == Role::Protagonist) {
            z.strategy_p[v] = None;
        }
        if !(won_by == Role::Antagonist && pg.role[v] == Role::Antagonist) {
            z.strategy_a[v] = None;
        }
    }
    Ok(Solution {
        winner,
        strategy_p: z.strategy_p,
        strategy_a: z.strategy_a,
    })
}

/// Product of an arena with a DPA: node `(v, q)` is `v * |Q| + q`, the
/// protagonist owns the nodes of one player, and the automaton advances on
/// the destination letter. At node `(v, q)` the component `q` is the
/// automaton state after reading the play up to and including `v`.
pub fn build_parity_game(
    arena: &Arena,
    protagonist: PlayerId,
    d: &Dpa,
) -> Result<ParityGame, AutomatonError> {
    if d.alphabet != arena.state_count() {
        return Err(AutomatonError::AlphabetMismatch(
            arena.state_count(),
            d.alphabet,
        ));
    }
    let q_count = d.state_count();
    let n = arena.state_count() * q_count;
    let mut role = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    for v in arena.states() {
        let r = if arena.owner(v) == protagonist {
            Role::Protagonist
        } else {
            Role::Antagonist
        };
        for q in 0..q_count {
            role.push(r);
            priority.push(d.priority[q]);
            succ.push(
                arena
                    .successors(v)
                    .iter()
                    .map(|&w| w * q_count + d.delta[q][w])
                    .collect(),
            );
        }
    }
    Ok(ParityGame::new(role, succ, priority))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Zielonka(#[from] ZielonkaError),
}

/// Where and how one player can honor the doomsday threat: the winning nodes
/// and positional strategy of the zero-sum game for "own objective holds or
/// every objective is violated".
#[derive(Debug, Clone)]
pub struct RetaliationRegion {
    pub player: PlayerId,
    pub dpa: Dpa,
    q_count: usize,
    winning: Vec<bool>,
    strategy: Vec<Option<usize>>,
}

impl RetaliationRegion {
    pub fn q_count(&self) -> usize {
        self.q_count
    }

    pub fn wins(&self, v: StateIdx, q: usize) -> bool {
        self.winning[v * self.q_count + q]
    }

    /// Prescribed successor `(v', q')` at a protagonist-owned winning node.
    pub fn choice(&self, v: StateIdx, q: usize) -> Option<(StateIdx, usize)> {
        self.strategy[v * self.q_count + q].map(|node| (node / self.q_count, node % self.q_count))
    }

    pub fn winning_mask(&self) -> &[bool] {
        &self.winning
    }
}

/// Compiles the retaliation objective of player `i`, builds the product game
/// with `i` as protagonist against the merged coalition, and solves it.
pub fn retaliation_region(
    arena: &Arena,
    profile: &ObjectiveProfile,
    i: PlayerId,
    product_cap: usize,
) -> Result<RetaliationRegion, RegionError> {
    let expr = retaliation_objective(i, profile);
    let dpa = compile_expr(arena, &expr, product_cap)?;
    if arena.state_count() * dpa.state_count() > product_cap {
        return Err(AutomatonError::SizeLimit(product_cap).into());
    }
    let pg = build_parity_game(arena, i, &dpa)?;
    let solution = zielonka_solve(&pg)?;
    let winning = solution.region(Role::Protagonist);
    Ok(RetaliationRegion {
        player: i,
        q_count: dpa.state_count(),
        dpa,
        winning,
        strategy: solution.strategy_p,
    })
}
