//! Finite transition systems with proposition labelings.
//!
//! States are interned to dense indices at construction time; every set the
//! rest of the crate manipulates is a bitset over those indices, so union,
//! intersection and the reachability fixpoints stay cheap and deterministic.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Dense index of a state inside one [`TransitionSystem`].
///
/// Ids are only meaningful for the system that produced them; mixing ids
/// across systems is a logic error the library guards against where it can
/// (path validation, set capacities).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A set of states of one system, backed by a fixed-width bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(capacity: usize) -> Self {
        StateSet {
            bits: FixedBitSet::with_capacity(capacity),
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        StateSet { bits }
    }

    pub fn singleton(capacity: usize, s: StateId) -> Self {
        let mut set = Self::empty(capacity);
        set.insert(s);
        set
    }

    pub fn from_ids<I: IntoIterator<Item = StateId>>(capacity: usize, ids: I) -> Self {
        let mut set = Self::empty(capacity);
        for s in ids {
            set.insert(s);
        }
        set
    }

    /// Number of states the underlying system has, not the cardinality.
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, s: StateId) {
        self.bits.insert(s.index());
    }

    pub fn remove(&mut self, s: StateId) {
        self.bits.remove(s.index());
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.bits.contains(s.index())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Smallest member by state index. Deterministic tie-breaker used by all
    /// witness reconstruction code.
    pub fn first(&self) -> Option<StateId> {
        self.bits.ones().next().map(|i| StateId(i as u32))
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.bits.ones().map(|i| StateId(i as u32))
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> StateSet {
        let mut out = StateSet::full(self.capacity());
        out.difference_with(self);
        out
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("transition references unknown state `{0}`")]
    UnknownTransitionEndpoint(String),
    #[error("labeling of proposition `{prop}` references unknown state `{state}`")]
    UnknownLabeledState { prop: String, state: String },
    #[error("`{0}` is a reserved proposition name")]
    ReservedProposition(String),
    #[error("system has no states")]
    NoStates,
}

/// A proposition name that is not part of the system's labeling.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown proposition `{0}`")]
pub struct UnknownProposition(pub String);

/// Non-fatal findings reported by [`build_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildWarning {
    /// The transition relation is not left-total: the listed states have no
    /// outgoing transition. Finite maximal behaviours simply stop there; the
    /// semantics stays well defined, so this is advisory only.
    NonLeftTotal { states: Vec<String> },
}

impl fmt::Display for BuildWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildWarning::NonLeftTotal { states } => write!(
                f,
                "transition relation is not left-total; states without successors: {}",
                states.join(", ")
            ),
        }
    }
}

/// Finite transition system: states, a transition relation and a labeling
/// that maps proposition names to state sets.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    names: Vec<String>,
    index: BTreeMap<String, StateId>,
    succ: Vec<Vec<StateId>>,
    pred: Vec<Vec<StateId>>,
    transition_count: usize,
    labeling: BTreeMap<String, StateSet>,
}

/// Builds a system from state names, transition pairs and a labeling.
///
/// Duplicate states and dangling references are hard errors. A transition
/// relation that is not left-total only yields a warning: maximal runs of the
/// modelled system may then be finite, which the path semantics tolerates.
pub fn build_system(
    states: Vec<String>,
    transitions: Vec<(String, String)>,
    labeling: BTreeMap<String, Vec<String>>,
) -> Result<(TransitionSystem, Vec<BuildWarning>), SystemError> {
    if states.is_empty() {
        return Err(SystemError::NoStates);
    }
    let mut index = BTreeMap::new();
    for (i, name) in states.iter().enumerate() {
        if index.insert(name.clone(), StateId(i as u32)).is_some() {
            return Err(SystemError::DuplicateState(name.clone()));
        }
    }
    let n = states.len();
    let mut succ: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (from, to) in &transitions {
        let f = *index
            .get(from)
            .ok_or_else(|| SystemError::UnknownTransitionEndpoint(from.clone()))?;
        let t = *index
            .get(to)
            .ok_or_else(|| SystemError::UnknownTransitionEndpoint(to.clone()))?;
        succ[f.index()].push(t);
        pred[t.index()].push(f);
    }
    let mut transition_count = 0;
    for list in succ.iter_mut() {
        list.sort_unstable();
        list.dedup();
        transition_count += list.len();
    }
    for list in pred.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut labels = BTreeMap::new();
    for (prop, members) in labeling {
        if prop == "true" || prop == "false" {
            return Err(SystemError::ReservedProposition(prop));
        }
        let mut set = StateSet::empty(n);
        for state in members {
            let id = index
                .get(&state)
                .ok_or_else(|| SystemError::UnknownLabeledState {
                    prop: prop.clone(),
                    state: state.clone(),
                })?;
            set.insert(*id);
        }
        labels.insert(prop, set);
    }
    // Always-available constants; every state is `true`, none is `false`.
    labels.insert("true".to_string(), StateSet::full(n));
    labels.insert("false".to_string(), StateSet::empty(n));
    let system = TransitionSystem {
        names: states,
        index,
        succ,
        pred,
        transition_count,
        labeling: labels,
    };
    let sinks: Vec<String> = system
        .states()
        .filter(|s| system.successors(*s).is_empty())
        .map(|s| system.state_name(s).to_string())
        .collect();
    let warnings = if sinks.is_empty() {
        Vec::new()
    } else {
        vec![BuildWarning::NonLeftTotal { states: sinks }]
    };
    Ok((system, warnings))
}

impl TransitionSystem {
    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transition_count
    }

    /// Size of the system: number of states plus number of transitions.
    pub fn size(&self) -> usize {
        self.state_count() + self.transition_count
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len() as u32).map(StateId)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s.index()]
    }

    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.succ[s.index()]
    }

    pub fn predecessors(&self, s: StateId) -> &[StateId] {
        &self.pred[s.index()]
    }

    pub fn has_transition(&self, from: StateId, to: StateId) -> bool {
        self.succ[from.index()].binary_search(&to).is_ok()
    }

    /// Transitions in (source index, target index) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.states()
            .flat_map(move |s| self.successors(s).iter().map(move |t| (s, *t)))
    }

    pub fn propositions(&self) -> impl Iterator<Item = &str> {
        self.labeling.keys().map(|k| k.as_str())
    }

    pub fn label_set(&self, prop: &str) -> Result<&StateSet, UnknownProposition> {
        self.labeling
            .get(prop)
            .ok_or_else(|| UnknownProposition(prop.to_string()))
    }

    pub fn labeled(&self, s: StateId, prop: &str) -> Result<bool, UnknownProposition> {
        Ok(self.label_set(prop)?.contains(s))
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.state_count())
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.state_count())
    }

    pub fn set_from_names<'a, I>(&self, names: I) -> Result<StateSet, SystemError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut set = self.empty_set();
        for name in names {
            let id = self
                .state_id(name)
                .ok_or_else(|| SystemError::UnknownTransitionEndpoint(name.to_string()))?;
            set.insert(id);
        }
        Ok(set)
    }

    pub fn names_of(&self, set: &StateSet) -> Vec<&str> {
        set.iter().map(|s| self.state_name(s)).collect()
    }

    /// One-step successors of a set.
    pub fn post_set(&self, set: &StateSet) -> StateSet {
        let mut out = self.empty_set();
        for s in set.iter() {
            for t in self.successors(s) {
                out.insert(*t);
            }
        }
        out
    }

    /// One-step predecessors of a set.
    pub fn pre_set(&self, set: &StateSet) -> StateSet {
        let mut out = self.empty_set();
        for s in set.iter() {
            for t in self.predecessors(s) {
                out.insert(*t);
            }
        }
        out
    }

    /// States reachable from `set`, including `set` itself: paths of size
    /// zero count as witnesses.
    pub fn reach(&self, set: &StateSet) -> StateSet {
        self.reach_impl(set, None, false)
    }

    /// States from which `set` is reachable, including `set` itself.
    pub fn coreach(&self, set: &StateSet) -> StateSet {
        self.reach_impl(set, None, true)
    }

    /// Reflexive reachability inside the subsystem obtained by deleting
    /// `forbidden`. Start states inside `forbidden` are dropped. Equivalent to
    /// `restrict(forbidden).reach(...)` but keeps the original indexing.
    pub fn reach_avoiding(&self, set: &StateSet, forbidden: &StateSet) -> StateSet {
        self.reach_impl(set, Some(forbidden), false)
    }

    pub fn coreach_avoiding(&self, set: &StateSet, forbidden: &StateSet) -> StateSet {
        self.reach_impl(set, Some(forbidden), true)
    }

    fn reach_impl(&self, set: &StateSet, forbidden: Option<&StateSet>, backward: bool) -> StateSet {
        let mut result = set.clone();
        if let Some(f) = forbidden {
            result.difference_with(f);
        }
        let mut frontier = result.clone();
        while !frontier.is_empty() {
            let mut next = if backward {
                self.pre_set(&frontier)
            } else {
                self.post_set(&frontier)
            };
            if let Some(f) = forbidden {
                next.difference_with(f);
            }
            next.difference_with(&result);
            if next.is_empty() {
                break;
            }
            result.union_with(&next);
            frontier = next;
        }
        result
    }

    /// Subsystem obtained by deleting `forbidden`: remaining states keep
    /// their names but are re-interned densely; transitions with a deleted
    /// endpoint vanish and the labeling is intersected with what is left.
    pub fn restrict(&self, forbidden: &StateSet) -> TransitionSystem {
        let kept: Vec<StateId> = self.states().filter(|s| !forbidden.contains(*s)).collect();
        let mut remap: Vec<Option<StateId>> = vec![None; self.state_count()];
        for (new, old) in kept.iter().enumerate() {
            remap[old.index()] = Some(StateId(new as u32));
        }
        let names: Vec<String> = kept
            .iter()
            .map(|s| self.state_name(*s).to_string())
            .collect();
        let mut index = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            index.insert(name.clone(), StateId(i as u32));
        }
        let n = kept.len();
        let mut succ: Vec<Vec<StateId>> = vec![Vec::new(); n];
        let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
        let mut transition_count = 0;
        for old in &kept {
            let new_from = remap[old.index()].unwrap();
            for t in self.successors(*old) {
                if let Some(new_to) = remap[t.index()] {
                    succ[new_from.index()].push(new_to);
                    pred[new_to.index()].push(new_from);
                    transition_count += 1;
                }
            }
        }
        for list in pred.iter_mut() {
            list.sort_unstable();
        }
        let labeling = self
            .labeling
            .iter()
            .map(|(prop, set)| {
                let mut new_set = StateSet::empty(n);
                for s in set.iter() {
                    if let Some(new) = remap[s.index()] {
                        new_set.insert(new);
                    }
                }
                (prop.clone(), new_set)
            })
            .collect();
        TransitionSystem {
            names,
            index,
            succ,
            pred,
            transition_count,
            labeling,
        }
    }

    /// States without outgoing transitions.
    pub fn sink_states(&self) -> StateSet {
        let mut out = self.empty_set();
        for s in self.states() {
            if self.successors(s).is_empty() {
                out.insert(s);
            }
        }
        out
    }
}

/// Convenience constructor used heavily by tests and the built-in fixtures.
#[derive(Default)]
pub struct SystemBuilder {
    states: Vec<String>,
    transitions: Vec<(String, String)>,
    labeling: BTreeMap<String, Vec<String>>,
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(mut self, name: &str) -> Self {
        self.states.push(name.to_string());
        self
    }

    pub fn states<'a, I: IntoIterator<Item = &'a str>>(mut self, names: I) -> Self {
        self.states.extend(names.into_iter().map(str::to_string));
        self
    }

    pub fn edge(mut self, from: &str, to: &str) -> Self {
        self.transitions.push((from.to_string(), to.to_string()));
        self
    }

    pub fn label<'a, I: IntoIterator<Item = &'a str>>(mut self, prop: &str, states: I) -> Self {
        self.labeling
            .entry(prop.to_string())
            .or_default()
            .extend(states.into_iter().map(str::to_string));
        self
    }

    pub fn build(self) -> Result<(TransitionSystem, Vec<BuildWarning>), SystemError> {
        build_system(self.states, self.transitions, self.labeling)
    }
}
