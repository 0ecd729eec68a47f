//! Goals, refinement expressions and path membership.
//!
//! A goal `pre >> post` denotes all paths that start in a state labeled
//! `pre` and end in one labeled `post`. Refinement expressions combine the
//! goals of a node's children:
//!
//! * `OR`  - the union of the children's path sets,
//! * `SAND` - concatenations of one path per child, in order,
//! * `AND` - paths that decompose in parallel into one factor per child,
//!   i.e. each child owns an anchoring and together they cover every step.
//!
//! Membership for `SAND` and `AND` is decided in linear passes (greedy
//! earliest cut points, widest anchorings); `oracle::member_definitional`
//! re-decides it by exhaustive search and the test suite keeps the two in
//! agreement.

use std::fmt;

use crate::path::{is_parallel_decomposition, Anchoring, Path};
use crate::system::{StateSet, TransitionSystem, UnknownProposition};

/// Refinement operator of a composed tree node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    Or,
    And,
    Sand,
}

impl Operator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Operator::Or => "OR",
            Operator::And => "AND",
            Operator::Sand => "SAND",
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `pre >> post`, both proposition names of the system under analysis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Goal {
    pub pre: String,
    pub post: String,
}

impl Goal {
    pub fn new(pre: impl Into<String>, post: impl Into<String>) -> Self {
        Goal {
            pre: pre.into(),
            post: post.into(),
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} >> {}", self.pre, self.post)
    }
}

/// Either a bare goal or an operator applied to the goals of the children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalExpression {
    Atomic(Goal),
    Composed { op: Operator, goals: Vec<Goal> },
}

impl GoalExpression {
    pub fn composed(op: Operator, goals: Vec<Goal>) -> Self {
        GoalExpression::Composed { op, goals }
    }

    /// Number of combined goals; 1 for an atomic expression.
    pub fn arity(&self) -> usize {
        match self {
            GoalExpression::Atomic(_) => 1,
            GoalExpression::Composed { goals, .. } => goals.len(),
        }
    }

    pub fn goals(&self) -> &[Goal] {
        match self {
            GoalExpression::Atomic(goal) => std::slice::from_ref(goal),
            GoalExpression::Composed { goals, .. } => goals,
        }
    }

    pub fn operator(&self) -> Option<Operator> {
        match self {
            GoalExpression::Atomic(_) => None,
            GoalExpression::Composed { op, .. } => Some(*op),
        }
    }
}

impl fmt::Display for GoalExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalExpression::Atomic(goal) => write!(f, "{goal}"),
            GoalExpression::Composed { op, goals } => {
                write!(f, "{op}(")?;
                for (i, g) in goals.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Does `path` belong to the semantics of `goal`? Only the endpoints matter.
pub fn path_satisfies_goal(
    system: &TransitionSystem,
    path: &Path,
    goal: &Goal,
) -> Result<bool, UnknownProposition> {
    let pre = system.label_set(&goal.pre)?;
    let post = system.label_set(&goal.post)?;
    Ok(pre.contains(path.first()) && post.contains(path.last()))
}

/// Does `path` belong to the semantics of `expr`?
pub fn path_satisfies_expression(
    system: &TransitionSystem,
    path: &Path,
    expr: &GoalExpression,
) -> Result<bool, UnknownProposition> {
    match expr {
        GoalExpression::Atomic(goal) => path_satisfies_goal(system, path, goal),
        GoalExpression::Composed { op, goals } => match op {
            Operator::Or => {
                for goal in goals {
                    if path_satisfies_goal(system, path, goal)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Operator::Sand => sand_member(system, path, goals),
            Operator::And => and_member(system, path, goals),
        },
    }
}

/// Sequential membership: the path splits into one factor per goal, in
/// order. Greedy earliest cut points are complete here because a cut only
/// has to land in the intersection "previous goal ends, next goal starts",
/// and taking the earliest admissible position never loses later options.
fn sand_member(
    system: &TransitionSystem,
    path: &Path,
    goals: &[Goal],
) -> Result<bool, UnknownProposition> {
    let first = goals.first().expect("composed arity checked upstream");
    let last = goals.last().unwrap();
    if !system.label_set(&first.pre)?.contains(path.first()) {
        return Ok(false);
    }
    if !system.label_set(&last.post)?.contains(path.last()) {
        return Ok(false);
    }
    let mut cut = 0usize;
    for pair in goals.windows(2) {
        let end_here = system.label_set(&pair[0].post)?;
        let start_next = system.label_set(&pair[1].pre)?;
        let found = (cut..=path.size())
            .find(|&k| end_here.contains(path.state_at(k)) && start_next.contains(path.state_at(k)));
        match found {
            Some(k) => cut = k,
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Parallel membership: give each goal its widest possible anchoring (first
/// position satisfying `pre`, last position satisfying `post`) and test
/// coverage. Widest anchorings are complete: any covering choice is
/// contained in the widest one, so coverage can only improve.
fn and_member(
    system: &TransitionSystem,
    path: &Path,
    goals: &[Goal],
) -> Result<bool, UnknownProposition> {
    let mut anchorings = Vec::with_capacity(goals.len());
    for goal in goals {
        match widest_anchoring(system, path, goal)? {
            Some(a) => anchorings.push(a),
            None => return Ok(false),
        }
    }
    Ok(is_parallel_decomposition(path, &anchorings).expect("anchorings built in range"))
}

/// The widest anchoring of `goal` on `path`, if any: minimal start position
/// labeled `pre`, maximal end position labeled `post`, start before end.
pub fn widest_anchoring(
    system: &TransitionSystem,
    path: &Path,
    goal: &Goal,
) -> Result<Option<Anchoring>, UnknownProposition> {
    let pre = system.label_set(&goal.pre)?;
    let post = system.label_set(&goal.post)?;
    let start = (0..=path.size()).find(|&k| pre.contains(path.state_at(k)));
    let end = (0..=path.size())
        .rev()
        .find(|&l| post.contains(path.state_at(l)));
    Ok(match (start, end) {
        (Some(k), Some(l)) if k <= l => Some(Anchoring::new(k, l).unwrap()),
        _ => None,
    })
}

/// Optional restrictions on the endpoints of a searched witness, as state
/// sets. `start_in`/`end_in` must contain the endpoint, `start_not_in`/
/// `end_not_in` must not. Used to phrase "a witness that additionally
/// (fails to) satisfy this goal" during property checking.
#[derive(Debug, Clone, Default)]
pub struct EndpointConstraint {
    pub start_in: Option<StateSet>,
    pub start_not_in: Option<StateSet>,
    pub end_in: Option<StateSet>,
    pub end_not_in: Option<StateSet>,
}

impl EndpointConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn start_in(set: StateSet) -> Self {
        EndpointConstraint {
            start_in: Some(set),
            ..Self::default()
        }
    }

    pub fn end_in(set: StateSet) -> Self {
        EndpointConstraint {
            end_in: Some(set),
            ..Self::default()
        }
    }

    pub fn both_in(start: StateSet, end: StateSet) -> Self {
        EndpointConstraint {
            start_in: Some(start),
            end_in: Some(end),
            ..Self::default()
        }
    }

    pub fn start_not_in(set: StateSet) -> Self {
        EndpointConstraint {
            start_not_in: Some(set),
            ..Self::default()
        }
    }

    pub fn end_not_in(set: StateSet) -> Self {
        EndpointConstraint {
            end_not_in: Some(set),
            ..Self::default()
        }
    }

    /// All states admissible as a witness start.
    pub fn allowed_start(&self, system: &TransitionSystem) -> StateSet {
        let mut set = system.full_set();
        if let Some(r) = &self.start_in {
            set.intersect_with(r);
        }
        if let Some(r) = &self.start_not_in {
            set.difference_with(r);
        }
        set
    }

    /// All states admissible as a witness end.
    pub fn allowed_end(&self, system: &TransitionSystem) -> StateSet {
        let mut set = system.full_set();
        if let Some(r) = &self.end_in {
            set.intersect_with(r);
        }
        if let Some(r) = &self.end_not_in {
            set.difference_with(r);
        }
        set
    }

    pub fn accepts(&self, system: &TransitionSystem, path: &Path) -> bool {
        self.allowed_start(system).contains(path.first())
            && self.allowed_end(system).contains(path.last())
    }
}
