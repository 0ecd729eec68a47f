//! Paths, factors and anchorings.
//!
//! A path is a non-empty sequence of states linked by transitions. Its size
//! is the number of transitions, so a single state is a path of size 0.
//! Anchorings name factors by index range: the factor of `[k, l]` spans
//! positions `k..=l` and has size `l - k`.

use std::fmt;

use thiserror::Error;

use crate::system::{StateId, TransitionSystem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least one state")]
    Empty,
    #[error("no transition from `{from}` to `{to}` at step {step}")]
    MissingTransition {
        from: String,
        to: String,
        step: usize,
    },
    #[error("state index {0} out of range for this system")]
    UnknownState(u32),
    #[error("unknown state name `{0}`")]
    UnknownStateName(String),
    #[error("anchoring [{start}, {end}] does not fit a path of size {size}")]
    AnchoringOutOfRange {
        start: usize,
        end: usize,
        size: usize,
    },
    #[error("cannot concatenate: factor {index} starts at `{found}`, previous ends at `{expected}`")]
    ConcatMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("cannot concatenate an empty sequence of paths")]
    ConcatEmpty,
}

/// Index range `[start, end]` naming a factor of some path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Anchoring {
    pub start: usize,
    pub end: usize,
}

impl Anchoring {
    /// `start <= end` is required; both ends are positions, not steps.
    pub fn new(start: usize, end: usize) -> Result<Self, PathError> {
        if start > end {
            return Err(PathError::AnchoringOutOfRange {
                start,
                end,
                size: 0,
            });
        }
        Ok(Anchoring { start, end })
    }

    /// Size of the anchored factor.
    pub fn size(&self) -> usize {
        self.end - self.start
    }

    /// Whether the step from position `j` to `j + 1` lies inside this range.
    pub fn covers_step(&self, j: usize) -> bool {
        self.start <= j && j + 1 <= self.end
    }

    fn fits(&self, path_size: usize) -> Result<(), PathError> {
        if self.end > path_size {
            return Err(PathError::AnchoringOutOfRange {
                start: self.start,
                end: self.end,
                size: path_size,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Anchoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// A validated path of one transition system.
///
/// Construction checks every step against the system's transition relation;
/// a `Path` value therefore always denotes a real behaviour of the system it
/// was built against. Paths must not be mixed across systems.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    states: Vec<StateId>,
}

impl Path {
    pub fn new(system: &TransitionSystem, states: Vec<StateId>) -> Result<Self, PathError> {
        if states.is_empty() {
            return Err(PathError::Empty);
        }
        for s in &states {
            if s.index() >= system.state_count() {
                return Err(PathError::UnknownState(s.0));
            }
        }
        for (j, pair) in states.windows(2).enumerate() {
            if !system.has_transition(pair[0], pair[1]) {
                return Err(PathError::MissingTransition {
                    from: system.state_name(pair[0]).to_string(),
                    to: system.state_name(pair[1]).to_string(),
                    step: j,
                });
            }
        }
        Ok(Path { states })
    }

    pub fn from_names<'a, I>(system: &TransitionSystem, names: I) -> Result<Self, PathError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let states = names
            .into_iter()
            .map(|name| {
                system
                    .state_id(name)
                    .ok_or_else(|| PathError::UnknownStateName(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Path::new(system, states)
    }

    pub fn singleton(state: StateId) -> Self {
        Path {
            states: vec![state],
        }
    }

    /// Number of transitions. A single state has size 0.
    pub fn size(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn state_at(&self, position: usize) -> StateId {
        self.states[position]
    }

    pub fn first(&self) -> StateId {
        self.states[0]
    }

    pub fn last(&self) -> StateId {
        *self.states.last().unwrap()
    }

    pub fn endpoints(&self) -> (StateId, StateId) {
        (self.first(), self.last())
    }

    /// The factor selected by `anchoring`; size 0 anchorings yield single
    /// states.
    pub fn factor(&self, anchoring: Anchoring) -> Result<Path, PathError> {
        anchoring.fits(self.size())?;
        Ok(Path {
            states: self.states[anchoring.start..=anchoring.end].to_vec(),
        })
    }

    /// Concatenation: consecutive factors must share their junction state,
    /// which appears once in the result. Sizes add up.
    pub fn concat(system: &TransitionSystem, parts: &[Path]) -> Result<Path, PathError> {
        let first = parts.first().ok_or(PathError::ConcatEmpty)?;
        let mut states = first.states.clone();
        for (i, part) in parts.iter().enumerate().skip(1) {
            let junction = *states.last().unwrap();
            if part.first() != junction {
                return Err(PathError::ConcatMismatch {
                    index: i,
                    expected: system.state_name(junction).to_string(),
                    found: system.state_name(part.first()).to_string(),
                });
            }
            states.extend_from_slice(&part.states[1..]);
        }
        Path::new(system, states)
    }

    /// No state occurs twice.
    pub fn is_elementary(&self) -> bool {
        self.states
            .iter()
            .enumerate()
            .all(|(i, s)| !self.states[i + 1..].contains(s))
    }

    /// A cycle is a factor of positive size with equal endpoints; this path
    /// is a cycle if it is one as a whole.
    pub fn is_cycle(&self) -> bool {
        self.size() > 0 && self.first() == self.last()
    }

    /// Removes cycles until the path is elementary.
    ///
    /// Policy: scan positions left to right; at the first state that occurs
    /// again later, delete the longest cycle starting there (cut to its last
    /// occurrence), then continue. Endpoints are preserved. The result is a
    /// canonical elementary path but not the only possible one: cycle removal
    /// is order dependent in general.
    pub fn remove_cycles(&self) -> Path {
        let mut states = self.states.clone();
        let mut i = 0;
        while i < states.len() {
            let last_occurrence = (i + 1..states.len())
                .rev()
                .find(|&j| states[j] == states[i]);
            if let Some(j) = last_occurrence {
                states.drain(i + 1..=j);
            }
            i += 1;
        }
        Path { states }
    }

    pub fn display<'a>(&'a self, system: &'a TransitionSystem) -> PathDisplay<'a> {
        PathDisplay { path: self, system }
    }

    pub fn names<'a>(&self, system: &'a TransitionSystem) -> Vec<&'a str> {
        self.states.iter().map(|s| system.state_name(*s)).collect()
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    system: &'a TransitionSystem,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.path.states.iter().enumerate() {
            if i > 0 {
                write!(f, " -> ")?;
            }
            write!(f, "{}", self.system.state_name(*s))?;
        }
        Ok(())
    }
}

/// Whether `anchorings` form a parallel decomposition of `path`: every step
/// of the path must lie inside at least one anchoring. A path of size 0 is
/// decomposed by any collection, including the empty one.
pub fn is_parallel_decomposition(
    path: &Path,
    anchorings: &[Anchoring],
) -> Result<bool, PathError> {
    for a in anchorings {
        a.fits(path.size())?;
    }
    Ok((0..path.size()).all(|j| anchorings.iter().any(|a| a.covers_step(j))))
}
