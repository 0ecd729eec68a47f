//! On-disk document formats: JSON system and tree descriptions plus the
//! boolean condition language used for proposition definitions and inline
//! goal conditions.

use thiserror::Error;

use crate::system::SystemError;
use crate::tree::TreeError;

pub mod document;
pub mod prop_expr;

pub use document::{
    compile_model, load_model, load_system, parse_system_document, parse_tree_document,
    CompiledModel, StateDocument, SystemDocument, TreeDocument,
};
pub use prop_expr::{ExprError, PropExpr};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid document at `{path}`: {message}")]
    Json { path: String, message: String },
    #[error("variable `{name}`: {message}")]
    Variable { name: String, message: String },
    #[error("state `{id}`: {message}")]
    State { id: String, message: String },
    #[error("proposition `{name}`: {message}")]
    Proposition { name: String, message: String },
    #[error("goal condition `{text}`: {message}")]
    GoalCondition { text: String, message: String },
    #[error("unknown operator `{0}`; expected OR, AND or SAND")]
    UnknownOperator(String),
    #[error("node {path}: `op` and `children` must be given together")]
    OpChildrenMismatch { path: String },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}
