//! Decision procedures for the five node properties and their reports.
//!
//! A [`Checker`] borrows a system and a tree and answers, per composed node:
//!
//! * non-empty: the refinement expression has at least one path,
//! * admissible: the node goal and (if composed) the refinement both do,
//! * meet: some path lies in the refinement and the node goal,
//! * under: every refinement path lies in the node goal,
//! * over: every node-goal path lies in the refinement,
//! * match: under and over.
//!
//! All engines are exact. Failing verdicts carry a concrete counterexample
//! path; meet and the emptiness checks carry a witness. Engines are chosen
//! per operator: OR and SAND properties reduce to reachability fixpoints,
//! AND needs the combinatorial marker search or, for over, a scan of the
//! cycle-free goal paths (dropping cycles never turns a non-member into a
//! member, so cycle-free counterexamples are enough).

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use thiserror::Error;

use crate::ef::EfFormula;
use crate::path::Path;
use crate::semantics::{
    path_satisfies_expression, EndpointConstraint, Goal, GoalExpression, Operator,
};
use crate::system::{StateId, StateSet, TransitionSystem, UnknownProposition};
use crate::tree::{AttackTree, NodePath, TreeError};
use crate::witness::{find_witness, shortest_path, shortest_path_avoiding};
pub use crate::witness::{SearchConfig, SearchStats};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    UnknownProposition(#[from] UnknownProposition),
    #[error("AND refinement has arity {arity}, above the configured cap {cap}")]
    AndArityExceeded { arity: usize, cap: usize },
    #[error("counterexample search exhausted its budget of {0} candidate paths")]
    CandidateBudgetExhausted(u64),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("node {0} is a leaf; refinement properties need a composed node")]
    LeafNode(NodePath),
}

/// The checkable properties. `non-empty` and `admissible` apply to every
/// node, the refinement properties only to composed nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyKind {
    NonEmpty,
    Admissible,
    Meet,
    Under,
    Over,
    Match,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 6] = [
        PropertyKind::NonEmpty,
        PropertyKind::Admissible,
        PropertyKind::Meet,
        PropertyKind::Under,
        PropertyKind::Over,
        PropertyKind::Match,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PropertyKind::NonEmpty => "non-empty",
            PropertyKind::Admissible => "admissible",
            PropertyKind::Meet => "meet",
            PropertyKind::Under => "under",
            PropertyKind::Over => "over",
            PropertyKind::Match => "match",
        }
    }

    /// Whether the property concerns a refinement (and hence needs a
    /// composed node) rather than the node goal alone.
    pub fn needs_refinement(&self) -> bool {
        !matches!(self, PropertyKind::NonEmpty | PropertyKind::Admissible)
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "non-empty" | "nonempty" => Ok(PropertyKind::NonEmpty),
            "admissible" => Ok(PropertyKind::Admissible),
            "meet" => Ok(PropertyKind::Meet),
            "under" => Ok(PropertyKind::Under),
            "over" => Ok(PropertyKind::Over),
            "match" => Ok(PropertyKind::Match),
            other => Err(format!(
                "unknown property `{other}`; expected one of non-empty, admissible, meet, under, over, match"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Work counters for one report. Wall time is kept out of the serialized
/// form so identical runs stay byte-identical.
#[derive(Debug, Clone, Default)]
pub struct CheckStats {
    pub states_explored: u64,
    pub weak_orders: u64,
    pub wall: Duration,
}

/// One verdict for one node and property.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub node: NodePath,
    pub property: PropertyKind,
    pub verdict: Verdict,
    /// Counterexample on fails; witness on holds where one exists (meet and
    /// the emptiness checks).
    pub evidence: Option<Path>,
    pub engine: String,
    pub detail: Option<String>,
    pub stats: CheckStats,
}

impl CheckReport {
    pub fn to_json(&self, system: &TransitionSystem) -> Value {
        let evidence = match &self.evidence {
            Some(path) => Value::Array(
                path.names(system)
                    .into_iter()
                    .map(|n| Value::String(n.to_string()))
                    .collect(),
            ),
            None => Value::Null,
        };
        json!({
            "node": self.node.to_string(),
            "property": self.property.as_str(),
            "verdict": self.verdict.as_str(),
            "evidence": evidence,
            "engine": self.engine,
            "detail": self.detail,
            "stats": {
                "states_explored": self.stats.states_explored,
                "weak_orders": self.stats.weak_orders,
            },
        })
    }

    /// One text line: mark, node, property, verdict, engine, then detail and
    /// (for fails always, for holds only when `show_witness`) the evidence
    /// path as arrow-joined state names.
    pub fn text_line(&self, system: &TransitionSystem, show_witness: bool) -> String {
        let mark = if self.verdict.holds() {
            '\u{2713}'
        } else {
            '\u{2717}'
        };
        let mut line = format!(
            "{mark} {} {} {} [{}]",
            self.node, self.property, self.verdict, self.engine
        );
        if let Some(detail) = &self.detail {
            line.push_str(&format!(" ({detail})"));
        }
        if let Some(path) = &self.evidence {
            if !self.verdict.holds() || show_witness {
                line.push_str(&format!(" evidence: {}", path.display(system)));
            }
        }
        line
    }
}

/// Renders reports as a JSON array with stable field names.
pub fn render_json(system: &TransitionSystem, reports: &[CheckReport]) -> String {
    let values: Vec<Value> = reports.iter().map(|r| r.to_json(system)).collect();
    let mut out = serde_json::to_string_pretty(&Value::Array(values)).expect("plain JSON values");
    out.push('\n');
    out
}

/// Renders reports as one text line per node.
pub fn render_text(
    system: &TransitionSystem,
    reports: &[CheckReport],
    show_witness: bool,
) -> String {
    let mut out = String::new();
    for report in reports {
        out.push_str(&report.text_line(system, show_witness));
        out.push('\n');
    }
    out
}

struct Outcome {
    verdict: Verdict,
    evidence: Option<Path>,
    engine: &'static str,
    detail: Option<String>,
    stats: SearchStats,
}

impl Outcome {
    fn holds(engine: &'static str, evidence: Option<Path>, stats: SearchStats) -> Self {
        Outcome {
            verdict: Verdict::Holds,
            evidence,
            engine,
            detail: None,
            stats,
        }
    }

    fn fails(
        engine: &'static str,
        evidence: Option<Path>,
        detail: impl Into<String>,
        stats: SearchStats,
    ) -> Self {
        Outcome {
            verdict: Verdict::Fails,
            evidence,
            engine,
            detail: Some(detail.into()),
            stats,
        }
    }
}

/// Checks properties of one tree against one system.
pub struct Checker<'a> {
    system: &'a TransitionSystem,
    tree: &'a AttackTree,
    config: SearchConfig,
}

impl<'a> Checker<'a> {
    pub fn new(system: &'a TransitionSystem, tree: &'a AttackTree) -> Self {
        Checker::with_config(system, tree, SearchConfig::default())
    }

    pub fn with_config(
        system: &'a TransitionSystem,
        tree: &'a AttackTree,
        config: SearchConfig,
    ) -> Self {
        Checker {
            system,
            tree,
            config,
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// Checks `property` at one node.
    pub fn check_node(
        &self,
        node: &NodePath,
        property: PropertyKind,
    ) -> Result<CheckReport, CheckError> {
        let started = Instant::now();
        let outcome = match property {
            PropertyKind::NonEmpty => self.nonempty_outcome(node)?,
            PropertyKind::Admissible => self.admissible_outcome(node)?,
            _ => {
                let (goal, op, goals) = self.composed_parts(node)?;
                match property {
                    PropertyKind::Meet => self.meet_outcome(&goal, op, &goals)?,
                    PropertyKind::Under => self.under_outcome(&goal, op, &goals)?,
                    PropertyKind::Over => self.over_outcome(&goal, op, &goals)?,
                    PropertyKind::Match => self.match_outcome(&goal, op, &goals)?,
                    _ => unreachable!("goal-only properties handled above"),
                }
            }
        };
        Ok(CheckReport {
            node: node.clone(),
            property,
            verdict: outcome.verdict,
            evidence: outcome.evidence,
            engine: outcome.engine.to_string(),
            detail: outcome.detail,
            stats: CheckStats {
                states_explored: outcome.stats.states_explored,
                weak_orders: outcome.stats.weak_orders,
                wall: started.elapsed(),
            },
        })
    }

    /// Checks `property` at every applicable node, in preorder: all nodes
    /// for the goal-level properties, composed nodes for the rest.
    pub fn check_global(&self, property: PropertyKind) -> Result<Vec<CheckReport>, CheckError> {
        let nodes = if property.needs_refinement() {
            self.tree.composed_nodes()
        } else {
            self.tree.all_nodes()
        };
        nodes
            .iter()
            .map(|node| self.check_node(node, property))
            .collect()
    }

    fn goal_sets(&self, goal: &Goal) -> Result<(StateSet, StateSet), CheckError> {
        Ok((
            self.system.label_set(&goal.pre)?.clone(),
            self.system.label_set(&goal.post)?.clone(),
        ))
    }

    fn composed_parts(
        &self,
        node: &NodePath,
    ) -> Result<(Goal, Operator, Vec<Goal>), CheckError> {
        let (goal, expr) = self.tree.expression_at(node)?;
        match expr {
            Some(GoalExpression::Composed { op, goals }) => Ok((goal, op, goals)),
            Some(GoalExpression::Atomic(g)) => Ok((goal, Operator::Or, vec![g])),
            None => Err(CheckError::LeafNode(node.clone())),
        }
    }

    fn nonempty_outcome(&self, node: &NodePath) -> Result<Outcome, CheckError> {
        let (goal, expr) = self.tree.expression_at(node)?;
        let expr = expr.unwrap_or(GoalExpression::Atomic(goal));
        let search = find_witness(
            self.system,
            &expr,
            &EndpointConstraint::none(),
            &self.config,
        )?;
        Ok(match search.witness {
            Some(path) => Outcome::holds("witness-search", Some(path), search.stats),
            None => Outcome::fails(
                "witness-search",
                None,
                "expression semantics is empty",
                search.stats,
            ),
        })
    }

    /// A node is admissible when its goal has a path and, for composed
    /// nodes, the refinement expression does too.
    fn admissible_outcome(&self, node: &NodePath) -> Result<Outcome, CheckError> {
        let (goal, expr) = self.tree.expression_at(node)?;
        let (iota, gamma) = self.goal_sets(&goal)?;
        let mut stats = SearchStats::default();
        stats.states_explored += (iota.len() + gamma.len()) as u64;
        let goal_witness = shortest_path(self.system, &iota, &gamma);
        let Some(goal_witness) = goal_witness else {
            return Ok(Outcome::fails(
                "witness-search",
                None,
                "goal semantics is empty",
                stats,
            ));
        };
        if let Some(expr) = expr {
            let search = find_witness(
                self.system,
                &expr,
                &EndpointConstraint::none(),
                &self.config,
            )?;
            stats.absorb(search.stats);
            if search.witness.is_none() {
                return Ok(Outcome::fails(
                    "witness-search",
                    None,
                    "refinement semantics is empty",
                    stats,
                ));
            }
        }
        Ok(Outcome::holds("witness-search", Some(goal_witness), stats))
    }

    fn meet_outcome(
        &self,
        goal: &Goal,
        op: Operator,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let (iota, gamma) = self.goal_sets(goal)?;
        let mut stats = SearchStats::default();
        match op {
            Operator::Or => {
                for (i, g) in goals.iter().enumerate() {
                    let phi = EfFormula::conj([
                        EfFormula::lit(&goal.pre),
                        EfFormula::lit(&g.pre),
                        EfFormula::ef(EfFormula::conj([
                            EfFormula::lit(&goal.post),
                            EfFormula::lit(&g.post),
                        ])),
                    ]);
                    let sat = phi.eval(self.system)?;
                    stats.states_explored += sat.len() as u64;
                    if !sat.is_empty() {
                        let from = iota.intersection(self.system.label_set(&g.pre)?);
                        let to = gamma.intersection(self.system.label_set(&g.post)?);
                        let witness = shortest_path(self.system, &from, &to)
                            .expect("EF evaluation found a meet");
                        let mut outcome = Outcome::holds("ef-disjunction", Some(witness), stats);
                        outcome.detail = Some(format!("disjunct {i} meets the node goal"));
                        return Ok(outcome);
                    }
                }
                Ok(Outcome::fails(
                    "ef-disjunction",
                    None,
                    "no disjunct meets the node goal",
                    stats,
                ))
            }
            Operator::Sand => {
                let n = goals.len();
                let mut chain = EfFormula::conj([
                    EfFormula::lit(&goals[n - 1].post),
                    EfFormula::lit(&goal.post),
                ]);
                for i in (0..n - 1).rev() {
                    chain = EfFormula::conj([
                        EfFormula::lit(&goals[i].post),
                        EfFormula::lit(&goals[i + 1].pre),
                        EfFormula::ef(chain),
                    ]);
                }
                let top = EfFormula::conj([
                    EfFormula::lit(&goal.pre),
                    EfFormula::lit(&goals[0].pre),
                    EfFormula::ef(chain),
                ]);
                let sat = top.eval(self.system)?;
                stats.states_explored += sat.len() as u64;
                if sat.is_empty() {
                    return Ok(Outcome::fails(
                        "ef-chain",
                        None,
                        "no stage chain fits inside the node goal",
                        stats,
                    ));
                }
                let expr = GoalExpression::composed(Operator::Sand, goals.to_vec());
                let search = find_witness(
                    self.system,
                    &expr,
                    &EndpointConstraint::both_in(iota, gamma),
                    &self.config,
                )?;
                stats.absorb(search.stats);
                let witness = search.witness.expect("EF chain is satisfiable");
                Ok(Outcome::holds("ef-chain", Some(witness), stats))
            }
            Operator::And => {
                let expr = GoalExpression::composed(Operator::And, goals.to_vec());
                let search = find_witness(
                    self.system,
                    &expr,
                    &EndpointConstraint::both_in(iota, gamma),
                    &self.config,
                )?;
                stats.absorb(search.stats);
                Ok(match search.witness {
                    Some(path) => Outcome::holds("marker-dfs", Some(path), stats),
                    None => Outcome::fails(
                        "marker-dfs",
                        None,
                        "no conjunct cover fits inside the node goal",
                        stats,
                    ),
                })
            }
        }
    }

    /// Under holds when no refinement path starts outside the node
    /// precondition or ends outside the node postcondition; the endpoints
    /// are all the node goal constrains.
    fn under_outcome(
        &self,
        goal: &Goal,
        op: Operator,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let (iota, gamma) = self.goal_sets(goal)?;
        let expr = GoalExpression::composed(op, goals.to_vec());
        let engine = match op {
            Operator::Or => "constrained-reach",
            Operator::And => "constrained-marker-dfs",
            Operator::Sand => "constrained-cut-chain",
        };
        let mut stats = SearchStats::default();
        let bad_start = find_witness(
            self.system,
            &expr,
            &EndpointConstraint::start_not_in(iota),
            &self.config,
        )?;
        stats.absorb(bad_start.stats);
        if let Some(path) = bad_start.witness {
            return Ok(Outcome::fails(
                engine,
                Some(path),
                "refinement admits a path starting outside the node precondition",
                stats,
            ));
        }
        let bad_end = find_witness(
            self.system,
            &expr,
            &EndpointConstraint::end_not_in(gamma),
            &self.config,
        )?;
        stats.absorb(bad_end.stats);
        if let Some(path) = bad_end.witness {
            return Ok(Outcome::fails(
                engine,
                Some(path),
                "refinement admits a path ending outside the node postcondition",
                stats,
            ));
        }
        Ok(Outcome::holds(engine, None, stats))
    }

    fn over_outcome(
        &self,
        goal: &Goal,
        op: Operator,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let (iota, gamma) = self.goal_sets(goal)?;
        match op {
            Operator::Or => self.over_or(&iota, &gamma, goals),
            Operator::Sand => self.over_sand(&iota, &gamma, goals),
            Operator::And => self.over_and(&iota, &gamma, goals),
        }
    }

    /// Membership in an OR of goals depends only on the endpoints, so a
    /// scan of the reachable endpoint pairs is exact.
    fn over_or(
        &self,
        iota: &StateSet,
        gamma: &StateSet,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let pre: Vec<&StateSet> = goals
            .iter()
            .map(|g| self.system.label_set(&g.pre))
            .collect::<Result<_, _>>()?;
        let post: Vec<&StateSet> = goals
            .iter()
            .map(|g| self.system.label_set(&g.post))
            .collect::<Result<_, _>>()?;
        let mut stats = SearchStats::default();
        for s in iota.iter() {
            let from = StateSet::singleton(self.system.state_count(), s);
            let reached = self.system.reach(&from);
            stats.states_explored += reached.len() as u64;
            for t in reached.intersection(gamma).iter() {
                let covered = (0..goals.len()).any(|i| pre[i].contains(s) && post[i].contains(t));
                if !covered {
                    let to = StateSet::singleton(self.system.state_count(), t);
                    let cex = shortest_path(self.system, &from, &to)
                        .expect("endpoint pair came from the reach set");
                    return Ok(Outcome::fails(
                        "endpoint-pair-scan",
                        Some(cex),
                        format!(
                            "no disjunct covers the goal path from {} to {}",
                            self.system.state_name(s),
                            self.system.state_name(t)
                        ),
                        stats,
                    ));
                }
            }
        }
        Ok(Outcome::holds("endpoint-pair-scan", None, stats))
    }

    /// SAND over-approximation check by stage closure. A goal path escapes
    /// the refinement in exactly three ways: it starts outside the first
    /// stage, ends outside the last stage, or reaches the postcondition
    /// from some boundary-entry set while skipping the next boundary. The
    /// entry sets accumulate the states where goal paths can first touch
    /// each stage boundary.
    fn over_sand(
        &self,
        iota: &StateSet,
        gamma: &StateSet,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let n = goals.len();
        let pre: Vec<&StateSet> = goals
            .iter()
            .map(|g| self.system.label_set(&g.pre))
            .collect::<Result<_, _>>()?;
        let post: Vec<&StateSet> = goals
            .iter()
            .map(|g| self.system.label_set(&g.post))
            .collect::<Result<_, _>>()?;
        let mut stats = SearchStats::default();

        let stray_start = iota.difference(pre[0]);
        let from_stray = self.system.reach(&stray_start);
        stats.states_explored += from_stray.len() as u64;
        if !from_stray.intersection(gamma).is_empty() {
            let cex = shortest_path(self.system, &stray_start, gamma)
                .expect("reach intersects the postcondition");
            return Ok(Outcome::fails(
                "stage-closure",
                Some(cex),
                "a goal path can start outside the first stage precondition",
                stats,
            ));
        }
        let stray_end = gamma.difference(post[n - 1]);
        let into_stray = self.system.coreach(&stray_end);
        stats.states_explored += into_stray.len() as u64;
        if !into_stray.intersection(iota).is_empty() {
            let cex = shortest_path(self.system, iota, &stray_end)
                .expect("coreach intersects the precondition");
            return Ok(Outcome::fails(
                "stage-closure",
                Some(cex),
                "a goal path can end outside the last stage postcondition",
                stats,
            ));
        }

        if n >= 2 {
            let cuts: Vec<StateSet> = (0..n - 1)
                .map(|j| post[j].intersection(pre[j + 1]))
                .collect();
            let mut entries: Vec<StateSet> = vec![iota.intersection(pre[0])];
            for j in 0..n - 1 {
                let open = entries[j].difference(&cuts[j]);
                let region = self.system.reach_avoiding(&open, &cuts[j]);
                stats.states_explored += region.len() as u64;
                if let Some(target) = region.intersection(gamma).first() {
                    let cex = self.skip_counterexample(&entries, &cuts, j, target)?;
                    return Ok(Outcome::fails(
                        "stage-closure",
                        Some(cex),
                        format!(
                            "a goal path can skip the boundary between stages {} and {}",
                            j + 1,
                            j + 2
                        ),
                        stats,
                    ));
                }
                let mut next = entries[j].clone();
                next.union_with(&self.system.post_set(&region));
                next.intersect_with(&cuts[j]);
                entries.push(next);
            }
        }
        Ok(Outcome::holds("stage-closure", None, stats))
    }

    /// Builds the counterexample for a skipped boundary `j`: a prefix that
    /// threads boundaries `0..j` in order, then a suffix that reaches the
    /// postcondition while avoiding boundary `j` entirely.
    fn skip_counterexample(
        &self,
        entries: &[StateSet],
        cuts: &[StateSet],
        j: usize,
        target: StateId,
    ) -> Result<Path, CheckError> {
        let open = entries[j].difference(&cuts[j]);
        let to = StateSet::singleton(self.system.state_count(), target);
        let tail = shortest_path_avoiding(self.system, &open, &to, Some(&cuts[j]))
            .expect("target taken from the avoiding reach set");
        let head = self.entry_path(entries, cuts, j, tail.first());
        Ok(Path::concat(self.system, &[head, tail]).expect("paths share the junction state"))
    }

    /// A path from the first entry set to `s`, touching boundaries `0..level`
    /// in order. Entry sets were built forward, so each entry state is
    /// either already an entry of the previous level or a one-step successor
    /// of the previous level's avoiding-reach region.
    fn entry_path(
        &self,
        entries: &[StateSet],
        cuts: &[StateSet],
        level: usize,
        s: StateId,
    ) -> Path {
        if level == 0 {
            return Path::singleton(s);
        }
        if entries[level - 1].contains(s) {
            return self.entry_path(entries, cuts, level - 1, s);
        }
        let open = entries[level - 1].difference(&cuts[level - 1]);
        let region = self.system.reach_avoiding(&open, &cuts[level - 1]);
        let here = StateSet::singleton(self.system.state_count(), s);
        let hop_from = self
            .system
            .pre_set(&here)
            .intersection(&region)
            .first()
            .expect("entry states have an in-region predecessor");
        let seg = shortest_path_avoiding(
            self.system,
            &open,
            &StateSet::singleton(self.system.state_count(), hop_from),
            Some(&cuts[level - 1]),
        )
        .expect("predecessor taken from the avoiding reach set");
        let head = self.entry_path(entries, cuts, level - 1, seg.first());
        let hop = Path::new(self.system, vec![hop_from, s]).expect("chosen from predecessors");
        Path::concat(self.system, &[head, seg, hop]).expect("junctions match by construction")
    }

    /// AND over-approximation check by scanning cycle-free goal paths.
    /// Dropping the cycles of a goal path preserves its endpoints and can
    /// only shrink what the conjunct factors must cover, so if some goal
    /// path escapes the refinement, a cycle-free one does.
    fn over_and(
        &self,
        iota: &StateSet,
        gamma: &StateSet,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let expr = GoalExpression::composed(Operator::And, goals.to_vec());
        let mut stats = SearchStats::default();
        let mut tested: u64 = 0;
        let mut on_path = self.system.empty_set();
        let mut prefix: Vec<StateId> = Vec::new();
        for s in iota.iter() {
            prefix.push(s);
            on_path.insert(s);
            let found =
                self.over_and_dfs(&mut prefix, &mut on_path, gamma, &expr, &mut tested, &mut stats)?;
            on_path.remove(s);
            prefix.pop();
            if let Some(cex) = found {
                return Ok(Outcome::fails(
                    "simple-path-scan",
                    Some(cex),
                    "a goal path admits no full conjunct cover",
                    stats,
                ));
            }
        }
        Ok(Outcome::holds("simple-path-scan", None, stats))
    }

    fn over_and_dfs(
        &self,
        prefix: &mut Vec<StateId>,
        on_path: &mut StateSet,
        gamma: &StateSet,
        expr: &GoalExpression,
        tested: &mut u64,
        stats: &mut SearchStats,
    ) -> Result<Option<Path>, CheckError> {
        let current = *prefix.last().expect("prefix starts non-empty");
        stats.states_explored += 1;
        if gamma.contains(current) {
            if let Some(cap) = self.config.max_simple_path_candidates {
                if *tested >= cap {
                    return Err(CheckError::CandidateBudgetExhausted(cap));
                }
            }
            *tested += 1;
            let candidate =
                Path::new(self.system, prefix.clone()).expect("DFS follows transitions");
            if !path_satisfies_expression(self.system, &candidate, expr)? {
                return Ok(Some(candidate));
            }
        }
        for &next in self.system.successors(current) {
            if on_path.contains(next) {
                continue;
            }
            prefix.push(next);
            on_path.insert(next);
            let found = self.over_and_dfs(prefix, on_path, gamma, expr, tested, stats)?;
            on_path.remove(next);
            prefix.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn match_outcome(
        &self,
        goal: &Goal,
        op: Operator,
        goals: &[Goal],
    ) -> Result<Outcome, CheckError> {
        let mut under = self.under_outcome(goal, op, goals)?;
        if !under.verdict.holds() {
            return Ok(Outcome {
                engine: "under-then-over",
                detail: under.detail.map(|d| format!("under fails: {d}")),
                ..under
            });
        }
        let over = self.over_outcome(goal, op, goals)?;
        under.stats.absorb(over.stats);
        if !over.verdict.holds() {
            return Ok(Outcome {
                verdict: Verdict::Fails,
                evidence: over.evidence,
                engine: "under-then-over",
                detail: over.detail.map(|d| format!("over fails: {d}")),
                stats: under.stats,
            });
        }
        Ok(Outcome::holds("under-then-over", None, under.stats))
    }
}
