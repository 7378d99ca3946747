//! Doomsday equilibria for multi-player turn-based games on finite graphs.
//!
//! A doomsday equilibrium is a strategy profile in which every player's
//! objective is satisfied, and any coalition deviation that violates even one
//! player's objective forces the violation of every player's objective. This
//! crate decides whether such a profile exists for reachability, safety,
//! Büchi, coBüchi and parity objectives, synthesizes a certificate (main
//! lasso plus per-player retaliation strategies), and independently verifies
//! certificates against the definition.
//!
//! Pipeline: objectives compile to deterministic parity automata
//! ([`automata`]), per-player retaliation regions come from zero-sum parity
//! games solved by Zielonka recursion ([`zerosum`]), the decision procedure
//! searches a tracked product for a permitted witness lasso ([`solver`]), and
//! [`verify`] re-checks everything straight from the definition with
//! finite-memory strategy machines and a bounded brute-force oracle.

pub mod arena;
pub mod automata;
pub mod io;
pub mod objectives;
pub mod rng;
pub mod solver;
pub mod verify;
pub mod zerosum;

pub use arena::{validate_arena, Arena, ArenaError, PlayerId, RawArena, StateIdx};
pub use automata::{dpa_accepts_lasso, dpa_complement, dpa_conj, dpa_disj, AutomatonError, Dpa};
pub use io::{
    export_dot, gen_random, parse_certificate_json, parse_game_file, serialize_game,
    serialize_result, GenError, GenParams, ParseError,
};
pub use objectives::{
    compile_expr, compile_objective_to_dpa, play_satisfies, retaliation_objective, ObjExpr,
    Objective, ObjectiveKind, ObjectiveProfile, PlayError,
};
pub use rng::SplitMix64;
pub use solver::{
    decide_doomsday, decide_doomsday_with_limits, permitted_edge, tracked_product, witness_search,
    Certificate, Limits, ProductNode, SolveError, TrackedProduct, Verdict,
};
pub use verify::{
    assemble_profile, check_profile, lasso_satisfying_all, one_player_emptiness,
    oracle_decide_bounded, oracle_decide_bounded_with_budget, profile_outcome, CheckReport,
    OracleBudget, OracleOutcome, StrategyMachine, StrategyProfile, VerifyError, Violation,
};
pub use zerosum::{
    attractor, build_parity_game, retaliation_region, zielonka_solve, ParityGame,
    RetaliationRegion, Role, Solution, ZielonkaError,
};
