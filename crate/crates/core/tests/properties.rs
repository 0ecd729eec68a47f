//! Randomized consistency checks between the exact engines, the
//! enumeration oracle, and the two membership tests.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use atc_core::oracle::{for_each_path, member_definitional, oracle_report, oracle_semantics};
use atc_core::semantics::path_satisfies_expression;
use atc_core::{
    AttackTree, Checker, Goal, GoalExpression, NodePath, Operator, Path, PropertyKind, StateId,
    SystemBuilder, TransitionSystem,
};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::{select, Index};

const PROPS: [&str; 4] = ["p0", "p1", "p2", "p3"];
const GOAL_PROPS: &[&str] = &["true", "false", "p0", "p1", "p2", "p3"];

fn assemble(n: usize, edges: &[bool], labels: &[bool]) -> TransitionSystem {
    let mut b = SystemBuilder::new();
    for i in 0..n {
        b = b.state(&format!("s{i}"));
    }
    for (k, &on) in edges.iter().enumerate() {
        if on {
            b = b.edge(&format!("s{}", k / n), &format!("s{}", k % n));
        }
    }
    for (k, &on) in labels.iter().enumerate() {
        if on {
            b = b.label(PROPS[k / n], [format!("s{}", k % n).as_str()]);
        }
    }
    // Keep every proposition name resolvable even when it labels nothing.
    for p in PROPS {
        b = b.label(p, std::iter::empty());
    }
    b.build().expect("generated systems are well formed").0
}

/// Random system: up to `max_states` states, edge density 0.3, four
/// propositions each labeling a state with probability 0.4.
fn arb_system(max_states: usize) -> impl Strategy<Value = TransitionSystem> {
    (1..=max_states).prop_flat_map(|n| {
        (
            Just(n),
            vec(proptest::bool::weighted(0.3), n * n),
            vec(proptest::bool::weighted(0.4), n * PROPS.len()),
        )
            .prop_map(|(n, edges, labels)| assemble(n, &edges, &labels))
    })
}

fn arb_goal() -> impl Strategy<Value = Goal> {
    (select(GOAL_PROPS), select(GOAL_PROPS)).prop_map(|(pre, post)| Goal::new(pre, post))
}

fn arb_op() -> impl Strategy<Value = Operator> {
    select(&[Operator::Or, Operator::And, Operator::Sand][..])
}

/// One composed node with two or three leaf children.
fn arb_tree() -> impl Strategy<Value = AttackTree> {
    (arb_goal(), arb_op(), vec(arb_goal(), 2..=3)).prop_map(|(goal, op, children)| {
        AttackTree::composed(goal, op, children.into_iter().map(AttackTree::leaf).collect())
    })
}

fn arb_expr() -> impl Strategy<Value = GoalExpression> {
    prop_oneof![
        arb_goal().prop_map(GoalExpression::Atomic),
        (arb_op(), vec(arb_goal(), 2..=3))
            .prop_map(|(op, goals)| GoalExpression::composed(op, goals)),
    ]
}

fn verdict_holds(
    checker: &Checker<'_>,
    node: &NodePath,
    property: PropertyKind,
) -> bool {
    checker
        .check_node(node, property)
        .expect("arity within cap, no candidate budget")
        .verdict
        .holds()
}

proptest! {
    /// `match` is exactly the conjunction of `under` and `over`.
    #[test]
    fn match_is_under_and_over(system in arb_system(5), tree in arb_tree()) {
        let checker = Checker::new(&system, &tree);
        let root = NodePath::root();
        let under = verdict_holds(&checker, &root, PropertyKind::Under);
        let over = verdict_holds(&checker, &root, PropertyKind::Over);
        let matches = verdict_holds(&checker, &root, PropertyKind::Match);
        prop_assert_eq!(matches, under && over);
    }

    /// On admissible nodes each one-sided match forces a meet: the
    /// contained side is non-empty, so containment yields a shared path.
    #[test]
    fn one_sided_match_forces_meet_when_admissible(
        system in arb_system(5),
        tree in arb_tree(),
    ) {
        let checker = Checker::new(&system, &tree);
        let root = NodePath::root();
        if verdict_holds(&checker, &root, PropertyKind::Admissible) {
            let meet = verdict_holds(&checker, &root, PropertyKind::Meet);
            if verdict_holds(&checker, &root, PropertyKind::Under) {
                prop_assert!(meet, "under-match without meet on an admissible node");
            }
            if verdict_holds(&checker, &root, PropertyKind::Over) {
                prop_assert!(meet, "over-match without meet on an admissible node");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The closed-form membership criteria used by the engines agree with
    /// membership by unfolding the definitions, on every path of size at
    /// most 8; and the oracle's enumerated semantics lists exactly the
    /// members.
    #[test]
    fn closed_form_membership_matches_definitional(
        system in arb_system(4),
        expr in arb_expr(),
    ) {
        let mut disagree: Option<(Vec<StateId>, bool, bool)> = None;
        let mut members: BTreeSet<Vec<StateId>> = BTreeSet::new();
        let _ = for_each_path(&system, &system.full_set(), None, 9, None, |states| {
            let path = Path::new(&system, states.to_vec()).unwrap();
            let closed = path_satisfies_expression(&system, &path, &expr).unwrap();
            let definitional = member_definitional(&system, &path, &expr).unwrap();
            if closed != definitional {
                disagree = Some((states.to_vec(), closed, definitional));
                return ControlFlow::Break(());
            }
            if definitional {
                members.insert(states.to_vec());
            }
            ControlFlow::Continue(())
        });
        prop_assert!(
            disagree.is_none(),
            "closed-form vs definitional membership on {:?}: {:?}",
            expr,
            disagree
        );
        let listed: BTreeSet<Vec<StateId>> = oracle_semantics(&system, &expr, 9)
            .unwrap()
            .into_iter()
            .map(|p| p.states().to_vec())
            .collect();
        prop_assert_eq!(listed, members);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Raising the enumeration budget only adds members: the smaller list
    /// is a subset, and it already contains every member that fits.
    #[test]
    fn oracle_semantics_grows_with_budget(
        system in arb_system(4),
        expr in arb_expr(),
        budget in 1usize..=7,
    ) {
        let as_set = |paths: Vec<Path>| -> BTreeSet<Vec<StateId>> {
            paths.into_iter().map(|p| p.states().to_vec()).collect()
        };
        let small = as_set(oracle_semantics(&system, &expr, budget).unwrap());
        let large = as_set(oracle_semantics(&system, &expr, budget + 2).unwrap());
        prop_assert!(small.is_subset(&large));
        for states in &large {
            if states.len() <= budget {
                prop_assert!(
                    small.contains(states),
                    "member {:?} fits budget {} but is missing",
                    states,
                    budget
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The exact engines and the enumeration oracle return the same
    /// verdict for every property on random single-refinement trees.
    #[test]
    fn engines_agree_with_oracle(system in arb_system(4), tree in arb_tree()) {
        let checker = Checker::new(&system, &tree);
        let root = NodePath::root();
        for property in PropertyKind::ALL {
            let exact = checker.check_node(&root, property).unwrap();
            let oracle = oracle_report(&system, &tree, &root, property, None).unwrap();
            prop_assert_eq!(
                exact.verdict,
                oracle.verdict,
                "{}: exact [{}] vs oracle ({:?})",
                property,
                exact.engine,
                oracle.detail
            );
        }
    }
}

proptest! {
    /// Cycle removal keeps the endpoints, yields an elementary path over a
    /// subset of the original states, and is idempotent.
    #[test]
    fn cycle_removal_preserves_endpoints(
        system in arb_system(5),
        start in any::<Index>(),
        picks in vec(any::<Index>(), 0..12),
    ) {
        let ids: Vec<StateId> = system.states().collect();
        let mut walk = vec![ids[start.index(ids.len())]];
        for pick in &picks {
            let succ = system.successors(*walk.last().unwrap());
            if succ.is_empty() {
                break;
            }
            walk.push(succ[pick.index(succ.len())]);
        }
        let path = Path::new(&system, walk).unwrap();
        let reduced = path.remove_cycles();
        prop_assert_eq!(reduced.first(), path.first());
        prop_assert_eq!(reduced.last(), path.last());
        prop_assert!(reduced.is_elementary());
        prop_assert!(reduced.size() <= path.size());
        let original: BTreeSet<StateId> = path.states().iter().copied().collect();
        for s in reduced.states() {
            prop_assert!(original.contains(s));
        }
        // Still a real path, and already cycle-free.
        prop_assert!(Path::new(&system, reduced.states().to_vec()).is_ok());
        let twice = reduced.remove_cycles();
        prop_assert_eq!(twice.states(), reduced.states());
    }
}
