//! Correctness checking of attack trees against finite transition systems.
//!
//! An attack tree refines a main goal into sub-goals with `OR`, `AND` and
//! `SAND` operators; a transition system describes what an attacker can
//! actually do. Each goal `pre >> post` denotes the system paths from a
//! `pre`-labeled state to a `post`-labeled one, and each refinement denotes
//! the paths obtainable by combining child paths under the operator. The
//! crate decides, per node or for the whole tree, how the two path sets
//! relate:
//!
//! * **non-emptiness** and **admissibility**: the goal (and the refinement)
//!   describe at least one real behaviour;
//! * **meet**: goal and refinement share a path;
//! * **under-match**: every refinement path achieves the goal;
//! * **over-match**: every goal path is covered by the refinement;
//! * **match**: both directions at once.
//!
//! Verdicts come with per-node evidence: a witness path when something
//! holds non-vacuously, a counterexample path when a universal property
//! fails. [`check::Checker`] implements the decision procedures on state
//! sets and reachability; [`oracle`] re-decides everything by bounded path
//! enumeration, which the test suite uses to pin the semantics down.
//!
//! Systems and trees are usually loaded from JSON documents ([`format`]),
//! and [`satgen`] turns CNF formulas into system/tree pairs whose root
//! admissibility encodes satisfiability, giving the test suite a second,
//! independent source of hard instances.

pub mod check;
pub mod dot;
pub mod ef;
pub mod fixtures;
pub mod format;
pub mod oracle;
pub mod path;
pub mod satgen;
pub mod semantics;
pub mod system;
pub mod tree;
pub mod witness;

pub use check::{CheckError, CheckReport, CheckStats, Checker, PropertyKind, Verdict};
pub use format::{
    compile_model, load_model, load_system, CompiledModel, FormatError, SystemDocument,
    TreeDocument,
};
pub use path::{Anchoring, Path, PathError};
pub use semantics::{EndpointConstraint, Goal, GoalExpression, Operator};
pub use system::{
    build_system, BuildWarning, StateId, StateSet, SystemBuilder, SystemError, TransitionSystem,
};
pub use tree::{AttackTree, NodePath, TreeError};
pub use witness::{SearchConfig, SearchStats};
