//! Witness searches: find a path in the semantics of a goal expression,
//! optionally under endpoint constraints.
//!
//! Atomic, OR and SAND searches work purely on state sets and reachability
//! fixpoints. The AND search is combinatorial: it enumerates weak orders of
//! the 2n anchoring markers (start and end marker per child goal) as ordered
//! set partitions into blocks, left to right, filtering each prefix with a
//! forward reachability pass. A block assignment that survives filtering is
//! turned back into a concrete path by a backward pass plus shortest-path
//! stitching, so every returned witness is a real, validated path.

use std::collections::{HashSet, VecDeque};

use crate::check::CheckError;
use crate::path::Path;
use crate::semantics::{EndpointConstraint, Goal, GoalExpression, Operator};
use crate::system::{StateId, StateSet, TransitionSystem};

/// Work counters reported alongside every verdict.
///
/// `states_explored` sums the sizes of the state sets an engine
/// materializes; `weak_orders` counts complete marker orders that survived
/// feasibility filtering in AND searches. OR and SAND engines never touch
/// the marker machinery, so for them `weak_orders` stays 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub states_explored: u64,
    pub weak_orders: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: SearchStats) {
        self.states_explored += other.states_explored;
        self.weak_orders += other.weak_orders;
    }

    fn visit(&mut self, set: &StateSet) {
        self.states_explored += set.len() as u64;
    }
}

/// Knobs for the combinatorial searches.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Hard cap on AND arity. The weak-order space grows like the ordered
    /// Bell numbers (4 goals mean 8 markers, 545 835 weak orders), so
    /// exceeding the cap is an error, never a silent approximation.
    pub max_and_arity: usize,
    /// Optional cap on how many candidate paths the simple-path
    /// counterexample search may test. `None` means unlimited; the search
    /// space is worst-case exponential in the number of states.
    pub max_simple_path_candidates: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_and_arity: 4,
            max_simple_path_candidates: None,
        }
    }
}

/// Result of a witness search.
#[derive(Debug, Clone)]
pub struct WitnessSearch {
    pub witness: Option<Path>,
    pub stats: SearchStats,
}

/// Searches a path in the semantics of `expr` whose endpoints satisfy
/// `constraint`. Returns the found witness or `None` if the constrained
/// semantics is empty; the decision is exact either way.
pub fn find_witness(
    system: &TransitionSystem,
    expr: &GoalExpression,
    constraint: &EndpointConstraint,
    config: &SearchConfig,
) -> Result<WitnessSearch, CheckError> {
    let mut stats = SearchStats::default();
    let witness = match expr {
        GoalExpression::Atomic(goal) => atomic_witness(system, goal, constraint, &mut stats)?,
        GoalExpression::Composed { op, goals } => match op {
            Operator::Or => {
                let mut found = None;
                for goal in goals {
                    if let Some(w) = atomic_witness(system, goal, constraint, &mut stats)? {
                        found = Some(w);
                        break;
                    }
                }
                found
            }
            Operator::Sand => sand_witness(system, goals, constraint, &mut stats)?,
            Operator::And => and_marker_search(system, goals, constraint, config, &mut stats)?,
        },
    };
    Ok(WitnessSearch { witness, stats })
}

fn atomic_witness(
    system: &TransitionSystem,
    goal: &Goal,
    constraint: &EndpointConstraint,
    stats: &mut SearchStats,
) -> Result<Option<Path>, CheckError> {
    let start = system
        .label_set(&goal.pre)?
        .intersection(&constraint.allowed_start(system));
    let end = system
        .label_set(&goal.post)?
        .intersection(&constraint.allowed_end(system));
    stats.visit(&start);
    stats.visit(&end);
    if start.is_empty() || end.is_empty() {
        return Ok(None);
    }
    Ok(shortest_path(system, &start, &end))
}

/// SAND search: a forward chain of cut sets, then a backward pass to pick
/// concrete cut states, then shortest-path stitching.
///
/// The chain is `S_1 = pre_1 (within allowed starts)` and
/// `S_{i+1} = pre_{i+1} n post_i n reach(S_i)`; a witness exists iff
/// `reach(S_n) n post_n` (within allowed ends) is non-empty. Cuts may
/// coincide, matching factors of size 0.
fn sand_witness(
    system: &TransitionSystem,
    goals: &[Goal],
    constraint: &EndpointConstraint,
    stats: &mut SearchStats,
) -> Result<Option<Path>, CheckError> {
    let n = goals.len();
    let mut layers: Vec<StateSet> = Vec::with_capacity(n);
    let first = system
        .label_set(&goals[0].pre)?
        .intersection(&constraint.allowed_start(system));
    stats.visit(&first);
    layers.push(first);
    for i in 1..n {
        let reached = system.reach(&layers[i - 1]);
        stats.visit(&reached);
        let mut next = system
            .label_set(&goals[i].pre)?
            .intersection(system.label_set(&goals[i - 1].post)?);
        next.intersect_with(&reached);
        layers.push(next);
    }
    let mut finals = system
        .label_set(&goals[n - 1].post)?
        .intersection(&system.reach(&layers[n - 1]));
    finals.intersect_with(&constraint.allowed_end(system));
    stats.visit(&finals);
    let goal_state = match finals.first() {
        Some(s) => s,
        None => return Ok(None),
    };

    let mut cuts: Vec<StateId> = vec![goal_state; n];
    let mut target = StateSet::singleton(system.state_count(), goal_state);
    for i in (0..n).rev() {
        let feasible = layers[i].intersection(&system.coreach(&target));
        let cut = feasible
            .first()
            .expect("forward chain guarantees a predecessor cut");
        cuts[i] = cut;
        target = StateSet::singleton(system.state_count(), cut);
    }

    let mut states: Vec<StateId> = vec![cuts[0]];
    for i in 0..n {
        let next = if i + 1 < n { cuts[i + 1] } else { goal_state };
        let seg = shortest_path(
            system,
            &StateSet::singleton(system.state_count(), cuts[i]),
            &StateSet::singleton(system.state_count(), next),
        )
        .expect("backward pass picked reachable cuts");
        states.extend_from_slice(&seg.states()[1..]);
    }
    Ok(Some(
        Path::new(system, states).expect("stitched along real transitions"),
    ))
}

/// AND search over weak orders of anchoring markers.
///
/// Child goal `i` contributes a start marker `k_i` (a position labeled
/// `pre_i`) and an end marker `l_i` (labeled `post_i`). A weak order of the
/// markers is explored as an ordered partition into blocks; blocks sit at
/// strictly increasing path positions. A partition describes a witness iff
///
/// * `k_i` is in a block no later than `l_i`'s,
/// * while markers remain after a block, some goal spans the gap
///   (its `k` placed, its `l` still pending) so every step stays covered,
/// * the per-block state sets, each the intersection of the member markers'
///   labels filtered by "reachable with at least one transition from the
///   previous block", stay non-empty.
///
/// Blocks are enumerated depth first in a fixed order (subsets of the
/// remaining markers by decreasing bitmask, markers `k_1..k_n, l_1..l_n`
/// from bit 0 up), and the first feasible weak order yields the witness, so
/// results are deterministic. Infeasible prefixes prune the whole subtree,
/// which keeps high arities from visiting all weak orders.
pub fn and_marker_search(
    system: &TransitionSystem,
    goals: &[Goal],
    constraint: &EndpointConstraint,
    config: &SearchConfig,
    stats: &mut SearchStats,
) -> Result<Option<Path>, CheckError> {
    let n = goals.len();
    let cap = config.max_and_arity.min(15);
    if n > cap {
        return Err(CheckError::AndArityExceeded {
            arity: n,
            cap: config.max_and_arity,
        });
    }
    let pre_sets = goals
        .iter()
        .map(|g| system.label_set(&g.pre))
        .collect::<Result<Vec<_>, _>>()?;
    let post_sets = goals
        .iter()
        .map(|g| system.label_set(&g.post))
        .collect::<Result<Vec<_>, _>>()?;
    let mut dfs = MarkerDfs {
        system,
        pre_sets,
        post_sets,
        allowed_start: constraint.allowed_start(system),
        allowed_end: constraint.allowed_end(system),
        n,
        stats,
        dead: HashSet::new(),
    };
    let all = (1u32 << (2 * n)) - 1;
    let mut frames = Vec::new();
    Ok(dfs.dfs(all, 0, &mut frames))
}

struct MarkerDfs<'a> {
    system: &'a TransitionSystem,
    pre_sets: Vec<&'a StateSet>,
    post_sets: Vec<&'a StateSet>,
    allowed_start: StateSet,
    allowed_end: StateSet,
    n: usize,
    stats: &'a mut SearchStats,
    // Failed (remaining markers, frontier) pairs. Everything the search can
    // still do from such a node is a function of exactly that pair, so a
    // repeat is safe to skip; witnesses are only built on success paths.
    dead: HashSet<(u32, Vec<u32>)>,
}

impl MarkerDfs<'_> {
    fn k_mask(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    fn memo_key(&self, remaining: u32, frames: &[StateSet]) -> (u32, Vec<u32>) {
        let frontier = frames
            .last()
            .map(|f| f.iter().map(|s| s.0).collect())
            .unwrap_or_default();
        (remaining, frontier)
    }

    fn dfs(&mut self, remaining: u32, placed_k: u32, frames: &mut Vec<StateSet>) -> Option<Path> {
        if remaining == 0 {
            self.stats.weak_orders += 1;
            let final_set = frames
                .last()
                .expect("at least one block")
                .intersection(&self.allowed_end);
            if final_set.is_empty() {
                return None;
            }
            return Some(self.reconstruct(frames, final_set));
        }
        let key = self.memo_key(remaining, frames);
        if self.dead.contains(&key) {
            return None;
        }
        // States reachable from the previous block with >= 1 transition;
        // shared by every candidate next block at this level.
        let base = frames.last().map(|f| {
            let r = self.system.reach(&self.system.post_set(f));
            self.stats.visit(&r);
            r
        });
        // Every further block sits inside the reach closure of the current
        // frontier (`base` is reach-closed already). A remaining marker whose
        // label set misses that region can never be placed, and the final
        // block must still meet the allowed ends, so such nodes are dead
        // before any subset is tried.
        let region = match &base {
            Some(b) => b.clone(),
            None => self.system.reach(&self.allowed_start),
        };
        let placeable = (0..self.n).all(|i| {
            (remaining & (1 << i) == 0 || !self.pre_sets[i].is_disjoint(&region))
                && (remaining & (1 << (self.n + i)) == 0
                    || !self.post_sets[i].is_disjoint(&region))
        });
        if !placeable || self.allowed_end.is_disjoint(&region) {
            self.dead.insert(key);
            return None;
        }
        let mut subset = remaining;
        while subset != 0 {
            if self.block_shape_ok(subset, placed_k, remaining) {
                let mut block_states = match &base {
                    Some(b) => b.clone(),
                    None => self.allowed_start.clone(),
                };
                for i in 0..self.n {
                    if subset & (1 << i) != 0 {
                        block_states.intersect_with(self.pre_sets[i]);
                    }
                    if subset & (1 << (self.n + i)) != 0 {
                        block_states.intersect_with(self.post_sets[i]);
                    }
                }
                if !block_states.is_empty() {
                    self.stats.visit(&block_states);
                    frames.push(block_states);
                    let found = self.dfs(
                        remaining & !subset,
                        placed_k | (subset & self.k_mask()),
                        frames,
                    );
                    if found.is_some() {
                        return found;
                    }
                    frames.pop();
                }
            }
            subset = (subset - 1) & remaining;
        }
        self.dead.insert(key);
        None
    }

    fn block_shape_ok(&self, subset: u32, placed_k: u32, remaining: u32) -> bool {
        let new_placed_k = placed_k | (subset & self.k_mask());
        // An end marker may not precede its start marker's block.
        if (subset >> self.n) & !new_placed_k != 0 {
            return false;
        }
        let rest = remaining & !subset;
        if rest != 0 {
            // Some anchoring must span the gap to the next block.
            let pending_l = rest >> self.n;
            if new_placed_k & pending_l == 0 {
                return false;
            }
        }
        true
    }

    /// From the surviving forward sets, pick concrete block states backward
    /// (each must still reach the next choice) and stitch the blocks with
    /// shortest segments of at least one transition.
    fn reconstruct(&mut self, frames: &[StateSet], final_set: StateSet) -> Path {
        let t = frames.len();
        let mut refined: Vec<StateSet> = vec![self.system.empty_set(); t];
        refined[t - 1] = final_set;
        for r in (0..t - 1).rev() {
            let pre = self.system.pre_set(&refined[r + 1]);
            refined[r] = frames[r].intersection(&self.system.coreach(&pre));
        }
        let mut current = refined[0]
            .first()
            .expect("backward refinement stays non-empty");
        let mut states = vec![current];
        for block in refined.iter().take(t).skip(1) {
            let onward = self
                .system
                .reach(&self.system.post_set(&StateSet::singleton(
                    self.system.state_count(),
                    current,
                )));
            let next = block
                .intersection(&onward)
                .first()
                .expect("refined blocks stay connected");
            let seg = shortest_path_min1(
                self.system,
                current,
                &StateSet::singleton(self.system.state_count(), next),
            )
            .expect("connectivity established by refinement");
            states.extend_from_slice(&seg.states()[1..]);
            current = next;
        }
        Path::new(self.system, states).expect("stitched along real transitions")
    }
}

/// Shortest path (by transition count, size 0 allowed) from any state of
/// `from` to any state of `to`, breaking ties toward smaller state indices.
pub(crate) fn shortest_path(
    system: &TransitionSystem,
    from: &StateSet,
    to: &StateSet,
) -> Option<Path> {
    shortest_path_avoiding(system, from, to, None)
}

/// Like [`shortest_path`] but never entering `forbidden` states.
pub(crate) fn shortest_path_avoiding(
    system: &TransitionSystem,
    from: &StateSet,
    to: &StateSet,
    forbidden: Option<&StateSet>,
) -> Option<Path> {
    let mut sources = from.clone();
    if let Some(f) = forbidden {
        sources.difference_with(f);
    }
    if let Some(s) = sources.intersection(to).first() {
        return Some(Path::singleton(s));
    }
    let mut parent: Vec<Option<StateId>> = vec![None; system.state_count()];
    let mut visited = sources.clone();
    let mut queue: VecDeque<StateId> = sources.iter().collect();
    while let Some(u) = queue.pop_front() {
        for &v in system.successors(u) {
            if visited.contains(v) || forbidden.is_some_and(|f| f.contains(v)) {
                continue;
            }
            visited.insert(v);
            parent[v.index()] = Some(u);
            if to.contains(v) {
                let mut states = vec![v];
                let mut cursor = v;
                while let Some(p) = parent[cursor.index()] {
                    states.push(p);
                    cursor = p;
                }
                states.reverse();
                return Some(Path::new(system, states).expect("BFS tree follows transitions"));
            }
            queue.push_back(v);
        }
    }
    None
}

/// Shortest path from `from` to `to` with at least one transition, needed
/// where consecutive blocks must sit at distinct path positions.
pub(crate) fn shortest_path_min1(
    system: &TransitionSystem,
    from: StateId,
    to: &StateSet,
) -> Option<Path> {
    let post = system.post_set(&StateSet::singleton(system.state_count(), from));
    let tail = shortest_path(system, &post, to)?;
    let mut states = vec![from];
    states.extend_from_slice(tail.states());
    Some(Path::new(system, states).expect("first hop is a transition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::semantics::path_satisfies_expression;
    use crate::system::SystemBuilder;

    fn sb() -> TransitionSystem {
        fixtures::sys_b()
    }

    #[test]
    fn atomic_witness_is_shortest() {
        let sys = sb();
        let expr = GoalExpression::Atomic(Goal::new("outside_ready", "room2_undetected"));
        let w = find_witness(&sys, &expr, &EndpointConstraint::none(), &Default::default())
            .unwrap()
            .witness
            .unwrap();
        // e0p -> e7p is the shortest of all entry runs.
        assert_eq!(w.names(&sys), vec!["e0p", "e7p"]);
    }

    #[test]
    fn atomic_witness_respects_constraints() {
        let sys = fixtures::sys_a();
        let expr = GoalExpression::Atomic(Goal::new("outside_ready", "room2_undetected"));
        let iota = sys.label_set("outside_ready").unwrap().clone();
        let w = find_witness(
            &sys,
            &expr,
            &EndpointConstraint::start_not_in(iota),
            &Default::default(),
        )
        .unwrap();
        assert!(w.witness.is_none());
    }

    #[test]
    fn or_witness_takes_first_feasible_disjunct() {
        let sys = fixtures::sys_c();
        let expr = GoalExpression::composed(
            Operator::Or,
            vec![
                Goal::new("outside_ready_window_open_no_roof", "room2_undetected"),
                Goal::new("outside_ready_window_closed_no_roof", "room2_undetected"),
            ],
        );
        let e8 = sys.set_from_names(["e8"]).unwrap();
        let none = find_witness(
            &sys,
            &expr,
            &EndpointConstraint::start_in(e8),
            &Default::default(),
        )
        .unwrap();
        assert!(none.witness.is_none());

        let some = find_witness(&sys, &expr, &EndpointConstraint::none(), &Default::default())
            .unwrap()
            .witness
            .unwrap();
        assert_eq!(some.names(&sys), vec!["e0p", "e7p"]);
    }

    #[test]
    fn sand_witness_traverses_cut_sets() {
        let sys = fixtures::sys_a();
        let expr = GoalExpression::composed(
            Operator::Sand,
            vec![
                Goal::new("outside_ready_any_camera", "door1_unlocked_door2_locked"),
                Goal::new("door1_unlocked_door2_locked", "both_doors_unlocked"),
                Goal::new("both_doors_unlocked", "in_room2"),
            ],
        );
        let w = find_witness(&sys, &expr, &EndpointConstraint::none(), &Default::default())
            .unwrap();
        let path = w.witness.unwrap();
        assert!(path_satisfies_expression(&sys, &path, &expr).unwrap());
        assert_eq!(
            path.names(&sys),
            vec!["e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7"]
        );
        assert_eq!(w.stats.weak_orders, 0);
    }

    #[test]
    fn and_witness_found_and_verified() {
        let sys = sb();
        let expr = GoalExpression::composed(
            Operator::And,
            vec![
                Goal::new("true", "camera_off"),
                Goal::new("outside_ready_any_camera", "in_room2"),
            ],
        );
        let mut stats = SearchStats::default();
        let goals = expr.goals().to_vec();
        let w = and_marker_search(
            &sys,
            &goals,
            &EndpointConstraint::none(),
            &Default::default(),
            &mut stats,
        )
        .unwrap()
        .unwrap();
        assert!(path_satisfies_expression(&sys, &w, &expr).unwrap());
        assert!(stats.weak_orders >= 1);
    }

    #[test]
    fn and_single_state_witness() {
        // Both goals are satisfied by the single state s: all four markers
        // collapse into one block and the witness has size 0.
        let (sys, _) = SystemBuilder::new()
            .states(["s", "t"])
            .edge("s", "t")
            .label("p", ["s"])
            .label("q", ["s"])
            .build()
            .unwrap();
        let goals = vec![Goal::new("p", "q"), Goal::new("p", "q")];
        let mut stats = SearchStats::default();
        let w = and_marker_search(
            &sys,
            &goals,
            &EndpointConstraint::none(),
            &Default::default(),
            &mut stats,
        )
        .unwrap()
        .unwrap();
        assert_eq!(w.size(), 0);
        assert_eq!(w.names(&sys), vec!["s"]);
    }

    #[test]
    fn and_disjoint_labels_have_no_witness() {
        let (sys, _) = SystemBuilder::new()
            .states(["a", "b"])
            .edge("a", "b")
            .label("p", ["a"])
            .label("np", ["b"])
            .build()
            .unwrap();
        let goals = vec![Goal::new("p", "p"), Goal::new("np", "np")];
        let mut stats = SearchStats::default();
        // A p-only path and an np-only path can never cover one another.
        let w = and_marker_search(
            &sys,
            &goals,
            &EndpointConstraint::none(),
            &Default::default(),
            &mut stats,
        )
        .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn and_arity_cap_is_enforced() {
        let sys = sb();
        let goals = vec![Goal::new("true", "true"); 5];
        let mut stats = SearchStats::default();
        let err = and_marker_search(
            &sys,
            &goals,
            &EndpointConstraint::none(),
            &Default::default(),
            &mut stats,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            CheckError::AndArityExceeded { arity: 5, cap: 4 }
        ));
    }

    #[test]
    fn shortest_path_prefers_low_indices() {
        let (sys, _) = SystemBuilder::new()
            .states(["a", "b", "c", "d"])
            .edge("a", "b")
            .edge("a", "c")
            .edge("b", "d")
            .edge("c", "d")
            .build()
            .unwrap();
        let from = sys.set_from_names(["a"]).unwrap();
        let to = sys.set_from_names(["d"]).unwrap();
        let p = shortest_path(&sys, &from, &to).unwrap();
        assert_eq!(p.names(&sys), vec!["a", "b", "d"]);

        // Size-0 hit when the sets intersect.
        let both = sys.set_from_names(["a", "d"]).unwrap();
        assert_eq!(shortest_path(&sys, &both, &both).unwrap().size(), 0);

        // Avoidance forces the other branch.
        let avoid = sys.set_from_names(["b"]).unwrap();
        let q = shortest_path_avoiding(&sys, &from, &to, Some(&avoid)).unwrap();
        assert_eq!(q.names(&sys), vec!["a", "c", "d"]);

        assert!(shortest_path(&sys, &to, &from).is_none());
    }

    #[test]
    fn shortest_path_min1_needs_a_transition() {
        let (sys, _) = SystemBuilder::new()
            .states(["a", "b"])
            .edge("a", "b")
            .edge("b", "a")
            .build()
            .unwrap();
        let a = sys.state_id("a").unwrap();
        let to_a = sys.set_from_names(["a"]).unwrap();
        // Plain shortest path would stop immediately; min1 goes around.
        let p = shortest_path_min1(&sys, a, &to_a).unwrap();
        assert_eq!(p.names(&sys), vec!["a", "b", "a"]);
    }
}
