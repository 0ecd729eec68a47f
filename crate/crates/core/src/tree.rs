//! Attack trees: every node carries a goal, composed nodes additionally an
//! operator and at least two children. Construction is purely structural;
//! whether the goals fit together in a given system is the business of the
//! property checkers.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::semantics::{Goal, GoalExpression, Operator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTree {
    pub goal: Goal,
    pub refinement: Option<Refinement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub op: Operator,
    pub children: Vec<AttackTree>,
}

/// Address of a node: the sequence of 0-based child indices from the root.
/// The empty sequence is the root itself, displayed as `root`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, index: usize) -> NodePath {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

impl FromStr for NodePath {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" {
            return Ok(NodePath::root());
        }
        let indices = s
            .split('.')
            .map(|part| {
                part.parse::<usize>()
                    .map_err(|_| TreeError::BadNodeSelector(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if indices.is_empty() {
            return Err(TreeError::BadNodeSelector(s.to_string()));
        }
        Ok(NodePath(indices))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {path} has {arity} child(ren); composed nodes need at least 2")]
    InvalidArity { path: NodePath, arity: usize },
    #[error("no node at path {0}")]
    NoSuchNode(NodePath),
    #[error("invalid node selector `{0}`; expected `root` or dot-separated indices like `1.0`")]
    BadNodeSelector(String),
}

impl AttackTree {
    pub fn leaf(goal: Goal) -> Self {
        AttackTree {
            goal,
            refinement: None,
        }
    }

    /// Structural constructor; arity violations surface via [`validate`],
    /// not here, so that malformed trees can be reported exhaustively.
    ///
    /// [`validate`]: AttackTree::validate
    pub fn composed(goal: Goal, op: Operator, children: Vec<AttackTree>) -> Self {
        AttackTree {
            goal,
            refinement: Some(Refinement { op, children }),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.refinement.is_none()
    }

    pub fn children(&self) -> &[AttackTree] {
        self.refinement
            .as_ref()
            .map(|r| r.children.as_slice())
            .unwrap_or(&[])
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(AttackTree::size).sum::<usize>()
    }

    /// All arity violations, in preorder. An empty result means the tree is
    /// well formed.
    pub fn validate(&self) -> Vec<TreeError> {
        let mut errors = Vec::new();
        self.validate_into(&NodePath::root(), &mut errors);
        errors
    }

    fn validate_into(&self, path: &NodePath, errors: &mut Vec<TreeError>) {
        if let Some(r) = &self.refinement {
            if r.children.len() < 2 {
                errors.push(TreeError::InvalidArity {
                    path: path.clone(),
                    arity: r.children.len(),
                });
            }
            for (i, child) in r.children.iter().enumerate() {
                child.validate_into(&path.child(i), errors);
            }
        }
    }

    pub fn node(&self, path: &NodePath) -> Option<&AttackTree> {
        let mut current = self;
        for &idx in &path.0 {
            current = current.children().get(idx)?;
        }
        Some(current)
    }

    /// The node's goal together with the refinement expression formed from
    /// its operator and the children's main goals. `None` for leaves.
    pub fn expression_at(
        &self,
        path: &NodePath,
    ) -> Result<(Goal, Option<GoalExpression>), TreeError> {
        let node = self
            .node(path)
            .ok_or_else(|| TreeError::NoSuchNode(path.clone()))?;
        let expr = node.refinement.as_ref().map(|r| {
            GoalExpression::composed(r.op, r.children.iter().map(|c| c.goal.clone()).collect())
        });
        Ok((node.goal.clone(), expr))
    }

    /// Preorder paths of all nodes.
    pub fn all_nodes(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        self.collect_nodes(&NodePath::root(), false, &mut out);
        out
    }

    /// Preorder paths of composed nodes only.
    pub fn composed_nodes(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        self.collect_nodes(&NodePath::root(), true, &mut out);
        out
    }

    fn collect_nodes(&self, path: &NodePath, composed_only: bool, out: &mut Vec<NodePath>) {
        if !composed_only || !self.is_leaf() {
            out.push(path.clone());
        }
        for (i, child) in self.children().iter().enumerate() {
            child.collect_nodes(&path.child(i), composed_only, out);
        }
    }
}
