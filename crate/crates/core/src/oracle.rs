//! Brute-force reference engine.
//!
//! Everything here is decided by enumerating paths and applying the
//! definitions directly: SAND membership tries every cut tuple, AND
//! membership every anchoring tuple. The exact engines are tested against
//! this module, and the CLI exposes it as an alternative engine.
//!
//! Enumeration budgets count states, not transitions, and the defaults come
//! from witness shrinking: a member path can be compressed, marker positions
//! kept and everything between them replaced by shortest segments, into at
//! most `2 * arity - 1` elementary pieces without changing its endpoints or
//! its membership. Searching up to `(2 * arity - 1) * (|S| - 1) + 1` states
//! with each state occurring at most `2 * arity - 1` times is therefore
//! exhaustive. Counterexamples to over-approximation shrink further: cycle
//! removal preserves endpoints and non-membership, so cycle-free goal paths
//! are enough there.

use std::ops::ControlFlow;
use std::time::Instant;

use crate::check::{CheckError, CheckReport, CheckStats, PropertyKind, Verdict};
use crate::path::Path;
use crate::semantics::{GoalExpression, Operator};
use crate::system::{StateId, StateSet, TransitionSystem, UnknownProposition};
use crate::tree::{AttackTree, NodePath};

/// Per-state occurrence bound sufficient for member searches of `expr`.
pub fn multiplicity_cap(expr: &GoalExpression) -> usize {
    2 * expr.arity() - 1
}

/// Number of states sufficient for member searches of `expr`: the witness
/// shrinking bound plus one for the initial state.
pub fn witness_budget(system: &TransitionSystem, expr: &GoalExpression) -> usize {
    multiplicity_cap(expr) * system.state_count().saturating_sub(1) + 1
}

/// Calls `f` on every path that starts in `roots`, stays inside `within`
/// (when given), has at most `max_states` state occurrences, and (if `cap`
/// is set) visits no state more than `cap` times. Paths are produced in
/// prefix order: roots ascending by index, successors ascending, each
/// prefix before its extensions.
pub fn for_each_path<F>(
    system: &TransitionSystem,
    roots: &StateSet,
    within: Option<&StateSet>,
    max_states: usize,
    cap: Option<usize>,
    mut f: F,
) -> ControlFlow<()>
where
    F: FnMut(&[StateId]) -> ControlFlow<()>,
{
    if max_states == 0 {
        return ControlFlow::Continue(());
    }
    let mut counts = vec![0usize; system.state_count()];
    let mut prefix: Vec<StateId> = Vec::with_capacity(max_states);
    for root in roots.iter() {
        if within.is_some_and(|w| !w.contains(root)) {
            continue;
        }
        counts[root.index()] = 1;
        prefix.push(root);
        let flow = extend(system, &mut prefix, &mut counts, within, max_states, cap, &mut f);
        prefix.pop();
        counts[root.index()] = 0;
        flow?;
    }
    ControlFlow::Continue(())
}

fn extend<F>(
    system: &TransitionSystem,
    prefix: &mut Vec<StateId>,
    counts: &mut [usize],
    within: Option<&StateSet>,
    max_states: usize,
    cap: Option<usize>,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[StateId]) -> ControlFlow<()>,
{
    f(prefix)?;
    if prefix.len() == max_states {
        return ControlFlow::Continue(());
    }
    let current = *prefix.last().expect("prefix is never empty");
    for &next in system.successors(current) {
        if within.is_some_and(|w| !w.contains(next)) {
            continue;
        }
        if cap.is_some_and(|m| counts[next.index()] >= m) {
            continue;
        }
        counts[next.index()] += 1;
        prefix.push(next);
        let flow = extend(system, prefix, counts, within, max_states, cap, f);
        prefix.pop();
        counts[next.index()] -= 1;
        flow?;
    }
    ControlFlow::Continue(())
}

/// Label sets of an expression resolved once, for membership tests in tight
/// loops.
struct ExprSets<'a> {
    op: Operator,
    pre: Vec<&'a StateSet>,
    post: Vec<&'a StateSet>,
}

impl<'a> ExprSets<'a> {
    fn resolve(
        system: &'a TransitionSystem,
        expr: &GoalExpression,
    ) -> Result<Self, UnknownProposition> {
        // A bare goal behaves like a one-goal OR: endpoints only.
        let op = expr.operator().unwrap_or(Operator::Or);
        let pre = expr
            .goals()
            .iter()
            .map(|g| system.label_set(&g.pre))
            .collect::<Result<Vec<_>, _>>()?;
        let post = expr
            .goals()
            .iter()
            .map(|g| system.label_set(&g.post))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExprSets { op, pre, post })
    }

    fn member(&self, states: &[StateId]) -> bool {
        match self.op {
            Operator::Or => {
                let first = states[0];
                let last = *states.last().expect("paths are non-empty");
                (0..self.pre.len())
                    .any(|i| self.pre[i].contains(first) && self.post[i].contains(last))
            }
            Operator::Sand => self.sand_member(states, 0, 0),
            Operator::And => self.and_member(states),
        }
    }

    /// Necessary conditions for any member to exist, read off the
    /// definitions: every required label set is inhabited and, for `SAND`,
    /// consecutive stages can share a junction state. Lets the searches
    /// skip enumeration instead of exhausting it.
    fn feasible(&self) -> bool {
        match self.op {
            Operator::Or => (0..self.pre.len())
                .any(|i| !self.pre[i].is_empty() && !self.post[i].is_empty()),
            Operator::Sand => {
                (0..self.pre.len()).all(|i| !self.pre[i].is_empty() && !self.post[i].is_empty())
                    && (1..self.pre.len())
                        .all(|i| !self.post[i - 1].is_disjoint(self.pre[i]))
            }
            Operator::And => {
                (0..self.pre.len()).all(|i| !self.pre[i].is_empty() && !self.post[i].is_empty())
            }
        }
    }

    /// Every member ends in this set: its final position must close some
    /// goal's anchoring (`AND`), the last stage (`SAND`), or the matching
    /// disjunct (`OR`).
    fn end_union(&self) -> StateSet {
        let mut out = StateSet::empty(self.post[0].capacity());
        match self.op {
            Operator::Sand => out.union_with(self.post[self.post.len() - 1]),
            Operator::Or | Operator::And => {
                for set in &self.post {
                    out.union_with(set);
                }
            }
        }
        out
    }

    /// Tries every cut tuple `0 = c_0 <= c_1 <= ... <= c_n = size` where
    /// stage `i` runs from `c_(i-1)` to `c_i`, starts in its precondition
    /// and ends in its postcondition.
    fn sand_member(&self, states: &[StateId], stage: usize, position: usize) -> bool {
        if !self.pre[stage].contains(states[position]) {
            return false;
        }
        let last = states.len() - 1;
        for cut in position..=last {
            if !self.post[stage].contains(states[cut]) {
                continue;
            }
            if stage + 1 == self.pre.len() {
                if cut == last {
                    return true;
                }
            } else if self.sand_member(states, stage + 1, cut) {
                return true;
            }
        }
        false
    }

    /// Tries anchoring tuples, one per goal, that jointly cover every step.
    /// Branches whose remaining goals cannot cover the missing steps are
    /// cut early.
    fn and_member(&self, states: &[StateId]) -> bool {
        let size = states.len() - 1;
        assert!(
            size < 64,
            "definitional AND membership supports sizes up to 63"
        );
        let full: u64 = (1u64 << size) - 1;
        let n = self.pre.len();
        let step_mask = |k: usize, l: usize| ((1u64 << (l - k)) - 1) << k;
        let mut anchors: Vec<Vec<u64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut list = Vec::new();
            for k in 0..=size {
                if !self.pre[i].contains(states[k]) {
                    continue;
                }
                for l in k..=size {
                    if self.post[i].contains(states[l]) {
                        list.push(step_mask(k, l));
                    }
                }
            }
            if list.is_empty() {
                return false;
            }
            anchors.push(list);
        }
        // suffix_cover[i]: all steps goals i.. could possibly cover.
        let mut suffix_cover = vec![0u64; n + 1];
        for i in (0..n).rev() {
            suffix_cover[i] = suffix_cover[i + 1] | anchors[i].iter().fold(0, |a, m| a | m);
        }
        fn cover(anchors: &[Vec<u64>], suffix: &[u64], i: usize, covered: u64, full: u64) -> bool {
            if i == anchors.len() {
                return covered == full;
            }
            if covered | suffix[i] != full {
                return false;
            }
            anchors[i]
                .iter()
                .any(|m| cover(anchors, suffix, i + 1, covered | m, full))
        }
        cover(&anchors, &suffix_cover, 0, 0, full)
    }
}

/// Membership by unfolding the definitions, with no use of the closed-form
/// criteria the fast engines rely on.
pub fn member_definitional(
    system: &TransitionSystem,
    path: &Path,
    expr: &GoalExpression,
) -> Result<bool, UnknownProposition> {
    Ok(ExprSets::resolve(system, expr)?.member(path.states()))
}

/// Every member of `expr` with at most `max_states` state occurrences,
/// sorted by size then lexicographically by state index.
pub fn oracle_semantics(
    system: &TransitionSystem,
    expr: &GoalExpression,
    max_states: usize,
) -> Result<Vec<Path>, UnknownProposition> {
    let sets = ExprSets::resolve(system, expr)?;
    let mut found: Vec<Path> = Vec::new();
    let _ = for_each_path(system, &system.full_set(), None, max_states, None, |states| {
        if sets.member(states) {
            found.push(Path::new(system, states.to_vec()).expect("walk follows transitions"));
        }
        ControlFlow::Continue(())
    });
    found.sort_by(|a, b| {
        a.size()
            .cmp(&b.size())
            .then_with(|| a.states().cmp(b.states()))
    });
    Ok(found)
}

struct OracleSearch {
    outcome: Option<Path>,
    examined: u64,
}

/// First path (in walk order) satisfying `select`, with the number of
/// candidates examined.
fn first_path<S>(
    system: &TransitionSystem,
    roots: &StateSet,
    within: Option<&StateSet>,
    max_states: usize,
    cap: Option<usize>,
    mut select: S,
) -> OracleSearch
where
    S: FnMut(&[StateId]) -> bool,
{
    let mut outcome = None;
    let mut examined = 0u64;
    let _ = for_each_path(system, roots, within, max_states, cap, |states| {
        examined += 1;
        if select(states) {
            outcome = Some(Path::new(system, states.to_vec()).expect("walk follows transitions"));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    OracleSearch { outcome, examined }
}

/// Oracle twin of `Checker::check_node`: same verdicts and evidence kinds,
/// but every decision made by enumeration. `budget` overrides the default
/// witness budget (in states).
pub fn oracle_report(
    system: &TransitionSystem,
    tree: &AttackTree,
    node: &NodePath,
    property: PropertyKind,
    budget: Option<usize>,
) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let (goal, expr) = tree.expression_at(node)?;
    let mut examined = 0u64;
    let (verdict, evidence, detail) = match property {
        PropertyKind::NonEmpty => {
            let expr = expr.unwrap_or(GoalExpression::Atomic(goal.clone()));
            let search = oracle_nonempty(system, &expr, budget)?;
            examined += search.examined;
            match search.outcome {
                Some(p) => (Verdict::Holds, Some(p), None),
                None => (
                    Verdict::Fails,
                    None,
                    Some("expression semantics is empty".to_string()),
                ),
            }
        }
        PropertyKind::Admissible => {
            let goal_expr = GoalExpression::Atomic(goal.clone());
            let search = oracle_nonempty(system, &goal_expr, budget)?;
            examined += search.examined;
            match search.outcome {
                None => (
                    Verdict::Fails,
                    None,
                    Some("goal semantics is empty".to_string()),
                ),
                Some(p) => match expr {
                    None => (Verdict::Holds, Some(p), None),
                    Some(expr) => {
                        let refinement = oracle_nonempty(system, &expr, budget)?;
                        examined += refinement.examined;
                        if refinement.outcome.is_some() {
                            (Verdict::Holds, Some(p), None)
                        } else {
                            (
                                Verdict::Fails,
                                None,
                                Some("refinement semantics is empty".to_string()),
                            )
                        }
                    }
                },
            }
        }
        _ => {
            let expr = expr.ok_or_else(|| CheckError::LeafNode(node.clone()))?;
            let iota = system.label_set(&goal.pre)?.clone();
            let gamma = system.label_set(&goal.post)?.clone();
            match property {
                PropertyKind::Meet => {
                    let search = oracle_meet(system, &iota, &gamma, &expr, budget)?;
                    examined += search.examined;
                    match search.outcome {
                        Some(p) => (Verdict::Holds, Some(p), None),
                        None => (
                            Verdict::Fails,
                            None,
                            Some("refinement and node goal share no path".to_string()),
                        ),
                    }
                }
                PropertyKind::Under => {
                    let search = oracle_under_counterexample(system, &iota, &gamma, &expr, budget)?;
                    examined += search.examined;
                    under_triple(system, &iota, search)
                }
                PropertyKind::Over => {
                    let search = oracle_over_counterexample(system, &iota, &gamma, &expr)?;
                    examined += search.examined;
                    over_triple(search)
                }
                PropertyKind::Match => {
                    let under = oracle_under_counterexample(system, &iota, &gamma, &expr, budget)?;
                    examined += under.examined;
                    if under.outcome.is_some() {
                        let (v, e, d) = under_triple(system, &iota, under);
                        (v, e, d.map(|d| format!("under fails: {d}")))
                    } else {
                        let over = oracle_over_counterexample(system, &iota, &gamma, &expr)?;
                        examined += over.examined;
                        let (v, e, d) = over_triple(over);
                        (v, e, d.map(|d| format!("over fails: {d}")))
                    }
                }
                _ => unreachable!("goal-only properties handled above"),
            }
        }
    };
    Ok(CheckReport {
        node: node.clone(),
        property,
        verdict,
        evidence,
        engine: "oracle".to_string(),
        detail,
        stats: CheckStats {
            states_explored: examined,
            weak_orders: 0,
            wall: started.elapsed(),
        },
    })
}

fn under_triple(
    system: &TransitionSystem,
    iota: &StateSet,
    search: OracleSearch,
) -> (Verdict, Option<Path>, Option<String>) {
    match search.outcome {
        None => (Verdict::Holds, None, None),
        Some(p) => {
            let detail = if !iota.contains(p.first()) {
                "refinement admits a path starting outside the node precondition"
            } else {
                "refinement admits a path ending outside the node postcondition"
            };
            let _ = system;
            (Verdict::Fails, Some(p), Some(detail.to_string()))
        }
    }
}

fn over_triple(search: OracleSearch) -> (Verdict, Option<Path>, Option<String>) {
    match search.outcome {
        None => (Verdict::Holds, None, None),
        Some(p) => (
            Verdict::Fails,
            Some(p),
            Some("a goal path lies outside the refinement".to_string()),
        ),
    }
}

const NO_MATCHES: OracleSearch = OracleSearch {
    outcome: None,
    examined: 0,
};

fn oracle_nonempty(
    system: &TransitionSystem,
    expr: &GoalExpression,
    budget: Option<usize>,
) -> Result<OracleSearch, UnknownProposition> {
    let sets = ExprSets::resolve(system, expr)?;
    if !sets.feasible() {
        return Ok(NO_MATCHES);
    }
    let within = system.coreach(&sets.end_union());
    let max_states = budget.unwrap_or_else(|| witness_budget(system, expr));
    Ok(first_path(
        system,
        &system.full_set(),
        Some(&within),
        max_states,
        Some(multiplicity_cap(expr)),
        |states| sets.member(states),
    ))
}

fn oracle_meet(
    system: &TransitionSystem,
    iota: &StateSet,
    gamma: &StateSet,
    expr: &GoalExpression,
    budget: Option<usize>,
) -> Result<OracleSearch, UnknownProposition> {
    let sets = ExprSets::resolve(system, expr)?;
    let ends = sets.end_union().intersection(gamma);
    if !sets.feasible() || ends.is_empty() {
        return Ok(NO_MATCHES);
    }
    let within = system.coreach(&ends);
    let max_states = budget.unwrap_or_else(|| witness_budget(system, expr));
    Ok(first_path(
        system,
        iota,
        Some(&within),
        max_states,
        Some(multiplicity_cap(expr)),
        |states| gamma.contains(*states.last().unwrap()) && sets.member(states),
    ))
}

fn oracle_under_counterexample(
    system: &TransitionSystem,
    iota: &StateSet,
    gamma: &StateSet,
    expr: &GoalExpression,
    budget: Option<usize>,
) -> Result<OracleSearch, UnknownProposition> {
    let sets = ExprSets::resolve(system, expr)?;
    if !sets.feasible() {
        return Ok(NO_MATCHES);
    }
    let within = system.coreach(&sets.end_union());
    let max_states = budget.unwrap_or_else(|| witness_budget(system, expr));
    Ok(first_path(
        system,
        &system.full_set(),
        Some(&within),
        max_states,
        Some(multiplicity_cap(expr)),
        |states| {
            let bad_endpoint = !iota.contains(states[0]) || !gamma.contains(*states.last().unwrap());
            bad_endpoint && sets.member(states)
        },
    ))
}

/// Cycle-free goal paths are enough: removing cycles keeps the endpoints
/// and cannot make a non-member a member.
fn oracle_over_counterexample(
    system: &TransitionSystem,
    iota: &StateSet,
    gamma: &StateSet,
    expr: &GoalExpression,
) -> Result<OracleSearch, UnknownProposition> {
    let sets = ExprSets::resolve(system, expr)?;
    Ok(first_path(
        system,
        iota,
        None,
        system.state_count(),
        Some(1),
        |states| gamma.contains(*states.last().unwrap()) && !sets.member(states),
    ))
}
