//! Bundled example models: a door-and-window burglary scenario in several
//! variants, used throughout the tests and the command line documentation.
//!
//! The JSON sources live in `fixtures/` at the repository root; this module
//! embeds and compiles them so tests cannot drift from the shipped files.

use crate::format::{load_model, load_system};
use crate::system::TransitionSystem;
use crate::tree::AttackTree;

/// Straight-line intrusion: unlock both doors in sequence.
pub const SYS_A_JSON: &str = include_str!("../../../fixtures/sys_a.json");
/// Same scenario with a retry loop between the camera room states.
pub const SYS_A_PRIME_JSON: &str = include_str!("../../../fixtures/sys_a_prime.json");
/// Adds a window entry shortcut bypassing both doors.
pub const SYS_B_JSON: &str = include_str!("../../../fixtures/sys_b.json");
/// Adds a roof entry that no goal in the tree accounts for.
pub const SYS_C_JSON: &str = include_str!("../../../fixtures/sys_c.json");
/// Break-in tree: window entry OR (camera off AND staged door entry).
pub const TREE1_JSON: &str = include_str!("../../../fixtures/tree1.json");
/// Two-leaf OR tree distinguishing window states, ignoring the roof.
pub const TREE2_JSON: &str = include_str!("../../../fixtures/tree2.json");
/// Small satisfiable CNF formula in DIMACS format.
pub const SAT_EXAMPLE_CNF: &str = include_str!("../../../fixtures/sat_example.cnf");

fn system(json: &str) -> TransitionSystem {
    load_system(json).expect("bundled fixture must compile").0
}

fn tree(system_json: &str, tree_json: &str) -> AttackTree {
    load_model(system_json, tree_json)
        .expect("bundled fixture must compile")
        .tree
        .expect("bundled tree fixture")
}

pub fn sys_a() -> TransitionSystem {
    system(SYS_A_JSON)
}

pub fn sys_a_prime() -> TransitionSystem {
    system(SYS_A_PRIME_JSON)
}

pub fn sys_b() -> TransitionSystem {
    system(SYS_B_JSON)
}

pub fn sys_c() -> TransitionSystem {
    system(SYS_C_JSON)
}

pub fn tree1() -> AttackTree {
    tree(SYS_B_JSON, TREE1_JSON)
}

pub fn tree2() -> AttackTree {
    tree(SYS_C_JSON, TREE2_JSON)
}
