//! Multi-player turn-based game graphs: validation and read access.
//!
//! An arena is a finite directed graph whose states are partitioned among
//! players 1..=n; the owner of the current state picks the successor. Every
//! state must have at least one outgoing edge so that plays are infinite.
//! Validation reindexes states in name order, which makes every downstream
//! iteration order (successor lists, product constructions, witness
//! tie-breaks) deterministic across runs and platforms.

use std::collections::BTreeMap;

use thiserror::Error;

/// Dense state index into an [`Arena`]. Indices are assigned in state-name
/// order by [`validate_arena`], so sorting by index equals sorting by name.
pub type StateIdx = usize;

/// 1-based player identifier.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PlayerId(pub u32);

impl PlayerId {
    /// Zero-based index for vector addressing.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl std::fmt::Display for PlayerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Unvalidated arena description, as read from a game file or built by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArena {
    pub player_count: u32,
    /// `(state id, owner)` pairs.
    pub states: Vec<(String, u32)>,
    /// Directed edges by state id.
    pub edges: Vec<(String, String)>,
    pub initial: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("state `{0}` has no outgoing edge")]
    DeadlockState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{id}` has owner {owner}, expected a player in 1..={players}")]
    BadOwner {
        id: String,
        owner: u32,
        players: u32,
    },
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
}

/// Validated turn-based game graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    player_count: u32,
    /// State names in ascending order; position = [`StateIdx`].
    names: Vec<String>,
    owner: Vec<PlayerId>,
    /// Ascending, duplicate-free, nonempty successor lists.
    succ: Vec<Vec<StateIdx>>,
    initial: StateIdx,
}

/// Checks every arena invariant and returns the canonical (name-ordered)
/// representation. Duplicate edges are merged; everything else is an error.
pub fn validate_arena(raw: &RawArena) -> Result<Arena, ArenaError> {
    let mut index: BTreeMap<&str, (usize, u32)> = BTreeMap::new();
    for (id, owner) in &raw.states {
        if index.insert(id.as_str(), (0, *owner)).is_some() {
            return Err(ArenaError::DuplicateState(id.clone()));
        }
    }
    for (pos, entry) in index.values_mut().enumerate() {
        entry.0 = pos;
    }

    let mut names = Vec::with_capacity(index.len());
    let mut owner = Vec::with_capacity(index.len());
    for (name, (_, own)) in &index {
        if *own == 0 || *own > raw.player_count {
            return Err(ArenaError::BadOwner {
                id: (*name).to_owned(),
                owner: *own,
                players: raw.player_count,
            });
        }
        names.push((*name).to_owned());
        owner.push(PlayerId(*own));
    }

    let resolve = |id: &str| -> Result<StateIdx, ArenaError> {
        index
            .get(id)
            .map(|(pos, _)| *pos)
            .ok_or_else(|| ArenaError::UnknownState(id.to_owned()))
    };

    let mut succ: Vec<Vec<StateIdx>> = vec![Vec::new(); names.len()];
    for (src, dst) in &raw.edges {
        let s = resolve(src)?;
        let d = resolve(dst)?;
        succ[s].push(d);
    }
    for list in &mut succ {
        list.sort_unstable();
        list.dedup();
    }
    if let Some(dead) = succ.iter().position(|list| list.is_empty()) {
        return Err(ArenaError::DeadlockState(names[dead].clone()));
    }

    let initial = resolve(&raw.initial)?;

    Ok(Arena {
        player_count: raw.player_count,
        names,
        owner,
        succ,
        initial,
    })
}

impl Arena {
    pub fn player_count(&self) -> u32 {
        self.player_count
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> StateIdx {
        self.initial
    }

    pub fn owner(&self, s: StateIdx) -> PlayerId {
        self.owner[s]
    }

    pub fn name(&self, s: StateIdx) -> &str {
        &self.names[s]
    }

    pub fn index_of(&self, name: &str) -> Option<StateIdx> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Sorted successor list; never empty for a validated arena.
    pub fn successors(&self, s: StateIdx) -> &[StateIdx] {
        &self.succ[s]
    }

    /// Name-keyed successor lookup, the file-facing variant of
    /// [`Arena::successors`].
    pub fn successors_by_name(&self, name: &str) -> Result<Vec<&str>, ArenaError> {
        let s = self
            .index_of(name)
            .ok_or_else(|| ArenaError::UnknownState(name.to_owned()))?;
        Ok(self.succ[s].iter().map(|&d| self.name(d)).collect())
    }

    pub fn has_edge(&self, src: StateIdx, dst: StateIdx) -> bool {
        self.succ[src].binary_search(&dst).is_ok()
    }

    pub fn states(&self) -> impl Iterator<Item = StateIdx> {
        0..self.names.len()
    }

    /// Inverse of [`validate_arena`], mainly for serialization and the
    /// idempotence property.
    pub fn to_raw(&self) -> RawArena {
        let mut edges = Vec::new();
        for s in self.states() {
            for &d in self.successors(s) {
                edges.push((self.names[s].clone(), self.names[d].clone()));
            }
        }
        RawArena {
            player_count: self.player_count,
            states: self
                .names
                .iter()
                .zip(&self.owner)
                .map(|(n, o)| (n.clone(), o.0))
                .collect(),
            edges,
            initial: self.names[self.initial].clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(players: u32, states: &[(&str, u32)], edges: &[(&str, &str)], init: &str) -> RawArena {
        RawArena {
            player_count: players,
            states: states.iter().map(|(n, o)| (n.to_string(), *o)).collect(),
            edges: edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            initial: init.to_string(),
        }
    }

    /// The game used throughout the docs and tests: player 2 picks between a
    /// target state and a sink at the start.
    pub(crate) fn g2_raw() -> RawArena {
        raw(
            2,
            &[("v", 2), ("t", 1), ("d", 1)],
            &[("v", "t"), ("v", "d"), ("t", "t"), ("d", "d")],
            "v",
        )
    }

    #[test]
    fn minimal_self_loop_is_valid() {
        let a = validate_arena(&raw(1, &[("a", 1)], &[("a", "a")], "a")).unwrap();
        assert_eq!(a.state_count(), 1);
        assert_eq!(a.successors(0), &[0]);
        assert_eq!(a.owner(0), PlayerId(1));
    }

    #[test]
    fn g2_validates_with_sorted_successors() {
        let a = validate_arena(&g2_raw()).unwrap();
        assert_eq!(a.state_count(), 3);
        // Name order: d, t, v.
        assert_eq!(a.name(0), "d");
        assert_eq!(a.name(1), "t");
        assert_eq!(a.name(2), "v");
        assert_eq!(a.successors_by_name("v").unwrap(), vec!["d", "t"]);
        assert_eq!(a.successors_by_name("t").unwrap(), vec!["t"]);
        assert_eq!(a.owner(a.index_of("v").unwrap()), PlayerId(2));
    }

    #[test]
    fn deadlock_is_rejected() {
        let err = validate_arena(&raw(1, &[("a", 1)], &[], "a")).unwrap_err();
        assert_eq!(err, ArenaError::DeadlockState("a".into()));
    }

    #[test]
    fn unknown_references_are_rejected() {
        let err = validate_arena(&raw(1, &[("a", 1)], &[("a", "b")], "a")).unwrap_err();
        assert_eq!(err, ArenaError::UnknownState("b".into()));
        let err = validate_arena(&raw(1, &[("a", 1)], &[("a", "a")], "x")).unwrap_err();
        assert_eq!(err, ArenaError::UnknownState("x".into()));
    }

    #[test]
    fn bad_owner_and_duplicates_are_rejected() {
        let err = validate_arena(&raw(1, &[("a", 2)], &[("a", "a")], "a")).unwrap_err();
        assert!(matches!(err, ArenaError::BadOwner { owner: 2, .. }));
        let err = validate_arena(&raw(1, &[("a", 1), ("a", 1)], &[("a", "a")], "a")).unwrap_err();
        assert_eq!(err, ArenaError::DuplicateState("a".into()));
    }

    #[test]
    fn successors_unknown_state_errors() {
        let a = validate_arena(&g2_raw()).unwrap();
        assert_eq!(
            a.successors_by_name("x").unwrap_err(),
            ArenaError::UnknownState("x".into())
        );
    }

    #[test]
    fn validation_is_idempotent() {
        let a = validate_arena(&g2_raw()).unwrap();
        let b = validate_arena(&a.to_raw()).unwrap();
        assert_eq!(a, b);
    }
}
