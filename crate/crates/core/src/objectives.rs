//! Objective data model and compilation into deterministic parity automata.
//!
//! One objective per player. All classes are state-based and evaluated on the
//! visited states of a play, initial state included. Büchi means "some
//! recurrence state infinitely often", coBüchi "eventually forever inside the
//! tail set", parity "minimum priority seen infinitely often is even".

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::arena::{Arena, PlayerId, StateIdx};
use crate::automata::{dpa_complement, dpa_conj_capped, dpa_disj_capped, AutomatonError, Dpa};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Reachability { target: BTreeSet<StateIdx> },
    Safety { safe: BTreeSet<StateIdx> },
    Buchi { rec: BTreeSet<StateIdx> },
    CoBuchi { tail: BTreeSet<StateIdx> },
    Parity { priority: BTreeMap<StateIdx, u32> },
}

/// Class tag, used for result metadata and the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Reachability,
    Safety,
    Buchi,
    CoBuchi,
    Parity,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 5] = [
        ObjectiveKind::Reachability,
        ObjectiveKind::Safety,
        ObjectiveKind::Buchi,
        ObjectiveKind::CoBuchi,
        ObjectiveKind::Parity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Reachability => "reach",
            ObjectiveKind::Safety => "safety",
            ObjectiveKind::Buchi => "buchi",
            ObjectiveKind::CoBuchi => "cobuchi",
            ObjectiveKind::Parity => "parity",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectiveKind> {
        Some(match s {
            "reach" => ObjectiveKind::Reachability,
            "safety" => ObjectiveKind::Safety,
            "buchi" => ObjectiveKind::Buchi,
            "cobuchi" => ObjectiveKind::CoBuchi,
            "parity" => ObjectiveKind::Parity,
            _ => return None,
        })
    }
}

impl Objective {
    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::Reachability { .. } => ObjectiveKind::Reachability,
            Objective::Safety { .. } => ObjectiveKind::Safety,
            Objective::Buchi { .. } => ObjectiveKind::Buchi,
            Objective::CoBuchi { .. } => ObjectiveKind::CoBuchi,
            Objective::Parity { .. } => ObjectiveKind::Parity,
        }
    }

    /// Type invariants against a companion arena: all referenced states
    /// exist; parity maps are total with priorities at most `2 * |states|`.
    pub fn validate(&self, arena: &Arena) -> Result<(), ObjectiveError> {
        let n = arena.state_count();
        let check_set = |set: &BTreeSet<StateIdx>| -> Result<(), ObjectiveError> {
            match set.iter().find(|&&s| s >= n) {
                Some(&s) => Err(ObjectiveError::UnknownState(s)),
                None => Ok(()),
            }
        };
        match self {
            Objective::Reachability { target } => check_set(target),
            Objective::Safety { safe } => check_set(safe),
            Objective::Buchi { rec } => check_set(rec),
            Objective::CoBuchi { tail } => check_set(tail),
            Objective::Parity { priority } => {
                for (&s, &p) in priority {
                    if s >= n {
                        return Err(ObjectiveError::UnknownState(s));
                    }
                    if p as usize > 2 * n {
                        return Err(ObjectiveError::PriorityOutOfRange {
                            state: s,
                            priority: p,
                        });
                    }
                }
                match arena.states().find(|s| !priority.contains_key(s)) {
                    Some(s) => Err(ObjectiveError::PartialParityMap(s)),
                    None => Ok(()),
                }
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("objective references state index {0} outside the arena")]
    UnknownState(StateIdx),
    #[error("parity map misses state index {0}")]
    PartialParityMap(StateIdx),
    #[error("parity priority {priority} at state {state} exceeds 2*|states|")]
    PriorityOutOfRange { state: StateIdx, priority: u32 },
}

/// One objective per player; index `i` holds player `i+1`'s objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveProfile {
    objectives: Vec<Objective>,
}

impl ObjectiveProfile {
    pub fn new(objectives: Vec<Objective>) -> ObjectiveProfile {
        ObjectiveProfile { objectives }
    }

    pub fn validate(&self, arena: &Arena) -> Result<(), ObjectiveError> {
        assert_eq!(
            self.objectives.len(),
            arena.player_count() as usize,
            "profile length must equal the player count"
        );
        for obj in &self.objectives {
            obj.validate(arena)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn of(&self, player: PlayerId) -> &Objective {
        &self.objectives[player.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Objective> {
        self.objectives.iter()
    }

    pub fn kinds(&self) -> Vec<ObjectiveKind> {
        self.objectives.iter().map(Objective::kind).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayError {
    #[error("consecutive play states {0} -> {1} are not an arena edge")]
    BrokenPath(StateIdx, StateIdx),
}

/// Whether the ultimately periodic play `stem . cycle^w` satisfies `obj`.
pub fn play_satisfies(
    arena: &Arena,
    obj: &Objective,
    stem: &[StateIdx],
    cycle: &[StateIdx],
) -> Result<bool, PlayError> {
    assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
    let path: Vec<StateIdx> = stem.iter().chain(cycle).copied().collect();
    for pair in path.windows(2) {
        if !arena.has_edge(pair[0], pair[1]) {
            return Err(PlayError::BrokenPath(pair[0], pair[1]));
        }
    }
    if !arena.has_edge(*path.last().unwrap(), cycle[0]) {
        return Err(PlayError::BrokenPath(*path.last().unwrap(), cycle[0]));
    }

    Ok(match obj {
        Objective::Reachability { target } => path.iter().any(|s| target.contains(s)),
        Objective::Safety { safe } => path.iter().all(|s| safe.contains(s)),
        Objective::Buchi { rec } => cycle.iter().any(|s| rec.contains(s)),
        Objective::CoBuchi { tail } => cycle.iter().all(|s| tail.contains(s)),
        Objective::Parity { priority } => cycle.iter().map(|s| priority[s]).min().unwrap() % 2 == 0,
    })
}

/// Compiles a base objective into a DPA over the arena's state alphabet.
///
/// Reachability and safety use a two-state absorbing automaton, Büchi and
/// coBüchi a two-state last-letter tracker, parity one state per priority
/// value occurring in the map.
pub fn compile_objective_to_dpa(arena: &Arena, obj: &Objective) -> Dpa {
    let alphabet = arena.state_count();
    let two_state = |hit: &BTreeSet<StateIdx>, absorb_on_hit: bool, pri: [u32; 2]| -> Dpa {
        // state 0 = "hit side", state 1 = "other side"
        let row = |state: usize| -> Vec<usize> {
            (0..alphabet)
                .map(|l| {
                    if absorb_on_hit && state == 0 {
                        0
                    } else {
                        usize::from(!hit.contains(&l))
                    }
                })
                .collect()
        };
        Dpa {
            alphabet,
            initial: 1,
            delta: vec![row(0), row(1)],
            priority: pri.to_vec(),
        }
    };
    match obj {
        // done=0 absorbing with priority 0, pending=1 with priority 1
        Objective::Reachability { target } => two_state(target, true, [0, 1]),
        // ok=0 (inside safe) priority 0, bad=1 absorbing priority 1: leaving
        // the safe set is recorded by absorption on the "other" side
        Objective::Safety { safe } => {
            let row = |state: usize| -> Vec<usize> {
                (0..alphabet)
                    .map(|l| {
                        if state == 1 {
                            1
                        } else {
                            usize::from(!safe.contains(&l))
                        }
                    })
                    .collect()
            };
            Dpa {
                alphabet,
                initial: 0,
                delta: vec![row(0), row(1)],
                priority: vec![0, 1],
            }
        }
        // inB=0 priority 0, outB=1 priority 1, tracking the last letter
        Objective::Buchi { rec } => two_state(rec, false, [0, 1]),
        // inC=0 priority 2, outC=1 priority 1
        Objective::CoBuchi { tail } => two_state(tail, false, [2, 1]),
        Objective::Parity { priority } => {
            let mut values: Vec<u32> = priority.values().copied().collect();
            values.sort_unstable();
            values.dedup();
            let pos = |p: u32| values.binary_search(&p).unwrap();
            let row: Vec<usize> = (0..alphabet).map(|l| pos(priority[&l])).collect();
            Dpa {
                alphabet,
                initial: 0,
                delta: vec![row; values.len()],
                priority: values,
            }
        }
    }
}

/// Boolean combination of objectives, compiled through the DPA algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjExpr {
    Atom(Objective),
    Not(Box<ObjExpr>),
    And(Vec<ObjExpr>),
    Or(Vec<ObjExpr>),
}

/// The property player `i` must be able to force after a deviation: either
/// its own objective still holds, or every player's objective is violated.
pub fn retaliation_objective(i: PlayerId, profile: &ObjectiveProfile) -> ObjExpr {
    let own = ObjExpr::Atom(profile.of(i).clone());
    let doom = ObjExpr::And(
        profile
            .iter()
            .map(|obj| ObjExpr::Not(Box::new(ObjExpr::Atom(obj.clone()))))
            .collect(),
    );
    ObjExpr::Or(vec![own, doom])
}

/// Compiles an expression tree via the DPA algebra, with a cap on product
/// states.
pub fn compile_expr(arena: &Arena, expr: &ObjExpr, cap: usize) -> Result<Dpa, AutomatonError> {
    match expr {
        ObjExpr::Atom(obj) => Ok(compile_objective_to_dpa(arena, obj)),
        ObjExpr::Not(inner) => Ok(dpa_complement(&compile_expr(arena, inner, cap)?)),
        ObjExpr::And(parts) => {
            let ds: Vec<Dpa> = parts
                .iter()
                .map(|p| compile_expr(arena, p, cap))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Dpa> = ds.iter().collect();
            dpa_conj_capped(&refs, cap)
        }
        ObjExpr::Or(parts) => {
            let ds: Vec<Dpa> = parts
                .iter()
                .map(|p| compile_expr(arena, p, cap))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Dpa> = ds.iter().collect();
            dpa_disj_capped(&refs, cap)
        }
    }
}
