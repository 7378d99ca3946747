//! Cross-cutting invariants: relabeling symmetries, the damage monotonicity
//! regression family, and structural facts about compiled automata.

use std::collections::BTreeSet;

use proptest::prelude::*;

use doomsday::{
    compile_objective_to_dpa, decide_doomsday, gen_random, parse_game_file, play_satisfies,
    validate_arena, zerosum::retaliation_region, Arena, GenParams, Objective, ObjectiveKind,
    ObjectiveProfile, PlayerId, RawArena, SplitMix64, StateIdx, Verdict,
};

fn arena_from(players: u32, names: &[(&str, u32)], edges: &[(&str, &str)], init: &str) -> Arena {
    validate_arena(&RawArena {
        player_count: players,
        states: names.iter().map(|(n, o)| (n.to_string(), *o)).collect(),
        edges: edges
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        initial: init.to_string(),
    })
    .unwrap()
}

/// Relabeling states with a bijection and permuting players (objectives
/// moved along) never changes the verdict.
#[test]
fn verdict_is_invariant_under_relabeling() {
    let mut rng = SplitMix64::new(0x9E9E_0001);
    for round in 0..40u64 {
        let class = ObjectiveKind::ALL[(round % 5) as usize];
        let params = GenParams::new(
            3 + (round % 3) as usize,
            2 + (round % 2) as u32,
            class,
            round,
        );
        let text = gen_random(&params).unwrap();
        let (arena, profile) = parse_game_file(&text).unwrap();
        let base = decide_doomsday(&arena, &profile).unwrap();

        // fresh names assigned in a shuffled order
        let n = arena.state_count();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            perm.swap(k, rng.below(k as u64 + 1) as usize);
        }
        let fresh = |s: StateIdx| format!("q{}", perm[s]);
        // player permutation: rotate by one
        let players = arena.player_count();
        let rotate = |p: u32| 1 + (p % players);

        let raw = arena.to_raw();
        let renamed = RawArena {
            player_count: players,
            states: arena
                .states()
                .map(|s| (fresh(s), rotate(arena.owner(s).0)))
                .collect(),
            edges: arena
                .states()
                .flat_map(|s| {
                    arena
                        .successors(s)
                        .iter()
                        .map(move |&d| (fresh(s), fresh(d)))
                        .collect::<Vec<_>>()
                })
                .collect(),
            initial: fresh(arena.initial()),
        };
        let renamed_arena = validate_arena(&renamed).unwrap();
        assert_eq!(raw.player_count, players);

        let translate = |s: StateIdx| renamed_arena.index_of(&fresh(s)).unwrap();
        let move_set = |set: &BTreeSet<StateIdx>| -> BTreeSet<StateIdx> {
            set.iter().map(|&s| translate(s)).collect()
        };
        let move_obj = |obj: &Objective| -> Objective {
            match obj {
                Objective::Reachability { target } => Objective::Reachability {
                    target: move_set(target),
                },
                Objective::Safety { safe } => Objective::Safety {
                    safe: move_set(safe),
                },
                Objective::Buchi { rec } => Objective::Buchi { rec: move_set(rec) },
                Objective::CoBuchi { tail } => Objective::CoBuchi {
                    tail: move_set(tail),
                },
                Objective::Parity { priority } => Objective::Parity {
                    priority: priority.iter().map(|(&s, &p)| (translate(s), p)).collect(),
                },
            }
        };
        // objective of player rotate(i) in the new game is player i's
        let mut rotated = vec![None; players as usize];
        for i in 1..=players {
            rotated[(rotate(i) - 1) as usize] = Some(move_obj(profile.of(PlayerId(i))));
        }
        let renamed_profile =
            ObjectiveProfile::new(rotated.into_iter().map(Option::unwrap).collect());

        let new = decide_doomsday(&renamed_arena, &renamed_profile).unwrap();
        assert_eq!(
            matches!(base, Verdict::Exists(_)),
            matches!(new, Verdict::Exists(_)),
            "seed {round}: relabeling flipped the verdict"
        );
    }
}

/// Regression family: deleting an off-path edge whose product targets lie
/// outside every region of a player owning its source never flips an Exists
/// verdict. The preconditions are asserted, not assumed.
#[test]
fn deleting_a_doomed_off_path_edge_preserves_existence() {
    // v -> u; at u player 2 picks the target t or the dead sink x
    let build = |with_escape: bool, second: &Objective| -> (Arena, ObjectiveProfile) {
        let mut edges = vec![("v", "u"), ("u", "t"), ("t", "t"), ("x", "x")];
        if with_escape {
            edges.push(("u", "x"));
        }
        let arena = arena_from(2, &[("v", 1), ("u", 2), ("t", 1), ("x", 1)], &edges, "v");
        let full: BTreeSet<StateIdx> = arena.states().collect();
        let profile = ObjectiveProfile::new(vec![Objective::Safety { safe: full }, second.clone()]);
        (arena, profile)
    };

    for second in [
        Objective::Reachability {
            target: BTreeSet::new(),
        },
        Objective::Buchi {
            rec: BTreeSet::new(),
        },
        Objective::CoBuchi {
            tail: BTreeSet::new(),
        },
    ] {
        // fill the second objective's set with {t} once the arena exists
        let (arena, _) = build(true, &second);
        let t = arena.index_of("t").unwrap();
        let filled = match &second {
            Objective::Reachability { .. } => Objective::Reachability {
                target: [t].into_iter().collect(),
            },
            Objective::Buchi { .. } => Objective::Buchi {
                rec: [t].into_iter().collect(),
            },
            Objective::CoBuchi { .. } => Objective::CoBuchi {
                tail: [t].into_iter().collect(),
            },
            _ => unreachable!(),
        };
        let (arena, profile) = build(true, &filled);
        let x = arena.index_of("x").unwrap();
        let u = arena.index_of("u").unwrap();

        // precondition: the deleted edge u -> x leaves the source antagonist
        // -owned in player 1's game, and every product-consistent landing
        // (x, q) lies outside W2
        assert_ne!(arena.owner(u), PlayerId(1));
        let r2 = retaliation_region(&arena, &profile, PlayerId(2), 1 << 20).unwrap();
        let mut seen = BTreeSet::new();
        let v0 = arena.initial();
        let mut stack = vec![(v0, r2.dpa.delta[r2.dpa.initial][v0])];
        while let Some((v, q)) = stack.pop() {
            if !seen.insert((v, q)) {
                continue;
            }
            for &w in arena.successors(v) {
                stack.push((w, r2.dpa.delta[q][w]));
            }
        }
        let mut landings = 0;
        for &(v, q) in &seen {
            if v == x {
                landings += 1;
                assert!(
                    !r2.wins(x, q),
                    "reachable landing (x, {q}) must be lost for player 2"
                );
            }
        }
        assert!(landings > 0, "x must be reachable in the product");

        let before = decide_doomsday(&arena, &profile).unwrap();
        let Verdict::Exists(cert) = &before else {
            panic!("the escape variant must have an equilibrium");
        };
        // the deleted edge is off the certificate path
        assert!(cert
            .stem
            .iter()
            .chain(&cert.cycle)
            .all(|n| n.arena_state != x));

        let (trimmed_arena, trimmed_profile) = build(false, &filled);
        let after = decide_doomsday(&trimmed_arena, &trimmed_profile).unwrap();
        assert!(
            matches!(after, Verdict::Exists(_)),
            "deleting the doomed edge flipped the verdict for {filled:?}"
        );
    }
}

/// Reachability and safety automata are absorbing: once the resolved state
/// is entered it is never left.
#[test]
fn reach_and_safety_dpas_are_absorbing() {
    let arena = arena_from(
        1,
        &[("a", 1), ("b", 1), ("c", 1)],
        &[
            ("a", "b"),
            ("b", "c"),
            ("c", "a"),
            ("a", "a"),
            ("b", "b"),
            ("c", "c"),
        ],
        "a",
    );
    let target: BTreeSet<StateIdx> = [1].into_iter().collect();
    let reach = compile_objective_to_dpa(
        &arena,
        &Objective::Reachability {
            target: target.clone(),
        },
    );
    let safety = compile_objective_to_dpa(&arena, &Objective::Safety { safe: target });
    // resolved state of a reach automaton: priority 0; of safety: priority 1
    for (dpa, resolved_pri) in [(&reach, 0), (&safety, 1)] {
        for (state, &pri) in dpa.priority.iter().enumerate() {
            if pri == resolved_pri {
                for letter in 0..dpa.alphabet {
                    assert_eq!(dpa.delta[state][letter], state, "absorbing state leaks");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Renaming all state ids by a bijection preserves validity in both
    /// directions, and successor sets follow the renaming.
    #[test]
    fn arena_validation_commutes_with_renaming(
        seed in 0u64..10_000,
        states in 1usize..7,
        broken in proptest::bool::ANY,
    ) {
        let mut rng = SplitMix64::new(seed);
        let raw = random_raw_arena(&mut rng, states, broken);
        let renamed = RawArena {
            player_count: raw.player_count,
            states: raw.states.iter().map(|(n, o)| (format!("x_{n}"), *o)).collect(),
            edges: raw
                .edges
                .iter()
                .map(|(a, b)| (format!("x_{a}"), format!("x_{b}")))
                .collect(),
            initial: format!("x_{}", raw.initial),
        };
        match (validate_arena(&raw), validate_arena(&renamed)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.state_count(), b.state_count());
                for s in a.states() {
                    prop_assert!(!a.successors(s).is_empty());
                    let t = b.index_of(&format!("x_{}", a.name(s))).unwrap();
                    let mapped: Vec<String> = a
                        .successors(s)
                        .iter()
                        .map(|&d| format!("x_{}", a.name(d)))
                        .collect();
                    let direct: Vec<String> =
                        b.successors(t).iter().map(|&d| b.name(d).to_string()).collect();
                    let mut mapped_sorted = mapped;
                    mapped_sorted.sort();
                    prop_assert_eq!(mapped_sorted, direct);
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "renaming changed validity: {:?} vs {:?}", a, b),
        }
    }

    /// Satisfaction of a play never depends on how the lasso is unrolled.
    #[test]
    fn play_satisfaction_survives_pumping(seed in 0u64..10_000, reps in 2usize..4) {
        let mut rng = SplitMix64::new(seed);
        let params = GenParams::new(1 + (seed % 5) as usize, 1,
            ObjectiveKind::ALL[(seed % 5) as usize], seed);
        let text = gen_random(&params).unwrap();
        let (arena, profile) = parse_game_file(&text).unwrap();
        // random walk to build a lasso
        let mut path = vec![arena.initial()];
        for _ in 0..6 {
            let cur = *path.last().unwrap();
            let succ = arena.successors(cur);
            path.push(succ[rng.below(succ.len() as u64) as usize]);
        }
        // close the cycle at the last repeated state, if any
        let last = *path.last().unwrap();
        if let Some(at) = path.iter().position(|&s| s == last) {
            if at + 1 < path.len() {
                let stem = path[..at].to_vec();
                let cycle = path[at..path.len() - 1].to_vec();
                let obj = profile.of(PlayerId(1));
                let base = play_satisfies(&arena, obj, &stem, &cycle).unwrap();
                let mut pumped = Vec::new();
                for _ in 0..reps {
                    pumped.extend_from_slice(&cycle);
                }
                prop_assert_eq!(play_satisfies(&arena, obj, &stem, &pumped).unwrap(), base);
            }
        }
    }

    /// Fixed seeds make the generator a pure function.
    #[test]
    fn generator_is_a_function_of_its_seed(seed in 0u64..100_000) {
        let params = GenParams::new(1 + (seed % 6) as usize, 1 + (seed % 3) as u32,
            ObjectiveKind::ALL[(seed % 5) as usize], seed);
        prop_assert_eq!(gen_random(&params).unwrap(), gen_random(&params).unwrap());
    }
}

fn random_raw_arena(rng: &mut SplitMix64, states: usize, broken: bool) -> RawArena {
    let name = |k: usize| format!("s{k}");
    let mut edges = Vec::new();
    for s in 0..states {
        // leave a deadlock in roughly half the broken arenas
        if broken && s == 0 && rng.below(2) == 0 {
            continue;
        }
        edges.push((name(s), name(rng.below(states as u64) as usize)));
        if rng.below(2) == 0 {
            edges.push((name(s), name(rng.below(states as u64) as usize)));
        }
    }
    let owner_limit = if broken { 3 } else { 2 };
    RawArena {
        player_count: 2,
        states: (0..states)
            .map(|s| (name(s), 1 + rng.below(owner_limit) as u32))
            .collect(),
        edges,
        initial: name(0),
    }
}
