//! JSON shapes for systems and attack trees, and their compilation into
//! [`TransitionSystem`] and [`AttackTree`] values.
//!
//! A system document labels states in two interchangeable ways: explicit
//! `props` lists on the states, and named boolean expressions over the state
//! variables in `propositions`. Tree goals may name a proposition or give an
//! inline condition; inline conditions become anonymous propositions keyed by
//! their own (trimmed) source text, so reports and exports stay readable.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::semantics::{Goal, Operator};
use crate::system::{build_system, BuildWarning, TransitionSystem};
use crate::tree::{AttackTree, NodePath};

use super::prop_expr::PropExpr;
use super::FormatError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    /// Enum-valued state variables and their value tokens.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub variables: BTreeMap<String, Vec<String>>,
    pub states: Vec<StateDocument>,
    pub transitions: Vec<(String, String)>,
    /// Propositions defined as boolean conditions over the variables.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub propositions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub id: String,
    /// Value per declared variable; must be total when variables exist.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assign: BTreeMap<String, String>,
    /// Propositions holding in this state, listed directly.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub props: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    /// Start condition; omitted means `true`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre: Option<String>,
    pub post: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeDocument>,
}

/// A compiled system/tree pair, ready for checking.
#[derive(Debug)]
pub struct CompiledModel {
    pub system: TransitionSystem,
    pub tree: Option<AttackTree>,
    pub warnings: Vec<BuildWarning>,
}

pub fn parse_system_document(text: &str) -> Result<SystemDocument, FormatError> {
    parse_document(text)
}

pub fn parse_tree_document(text: &str) -> Result<TreeDocument, FormatError> {
    parse_document(text)
}

fn parse_document<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| FormatError::Json {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn load_system(json: &str) -> Result<(TransitionSystem, Vec<BuildWarning>), FormatError> {
    let doc = parse_system_document(json)?;
    let compiled = compile_model(&doc, None)?;
    Ok((compiled.system, compiled.warnings))
}

pub fn load_model(system_json: &str, tree_json: &str) -> Result<CompiledModel, FormatError> {
    let system_doc = parse_system_document(system_json)?;
    let tree_doc = parse_tree_document(tree_json)?;
    compile_model(&system_doc, Some(&tree_doc))
}

/// Compiles a system document, and a tree document against it when given.
///
/// All validation happens here: total assignments over declared variables,
/// reserved proposition names, collisions between the two labeling styles,
/// operator/children consistency and arities. Inline goal conditions are
/// parsed and interned as propositions before the single system build, so
/// the resulting system answers every label the tree mentions.
pub fn compile_model(
    system_doc: &SystemDocument,
    tree_doc: Option<&TreeDocument>,
) -> Result<CompiledModel, FormatError> {
    validate_variables(system_doc)?;
    validate_states(system_doc)?;

    let mut listed_props = BTreeSet::new();
    for state in &system_doc.states {
        for name in &state.props {
            if is_reserved(name) {
                return Err(FormatError::Proposition {
                    name: name.clone(),
                    message: "name is reserved".to_string(),
                });
            }
            listed_props.insert(name.clone());
        }
    }

    let mut defined_props = BTreeMap::new();
    for (name, source) in &system_doc.propositions {
        if is_reserved(name) {
            return Err(FormatError::Proposition {
                name: name.clone(),
                message: "name is reserved".to_string(),
            });
        }
        if listed_props.contains(name) {
            return Err(FormatError::Proposition {
                name: name.clone(),
                message: "defined both as an expression and in state `props` lists".to_string(),
            });
        }
        let expr = PropExpr::parse(source).map_err(|e| FormatError::Proposition {
            name: name.clone(),
            message: e.to_string(),
        })?;
        check_comparisons(&expr, &system_doc.variables).map_err(|message| {
            FormatError::Proposition {
                name: name.clone(),
                message,
            }
        })?;
        defined_props.insert(name.clone(), expr);
    }

    let mut universe: BTreeSet<String> = listed_props.clone();
    universe.extend(defined_props.keys().cloned());
    universe.insert("true".to_string());
    universe.insert("false".to_string());

    let mut inline = BTreeMap::new();
    let tree_shape = tree_doc
        .map(|doc| convert_tree(doc, &NodePath::root(), &universe, system_doc, &mut inline))
        .transpose()?;

    let mut labeling: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for name in &listed_props {
        labeling.insert(name.clone(), Vec::new());
    }
    for state in &system_doc.states {
        for name in &state.props {
            labeling
                .get_mut(name)
                .expect("collected above")
                .push(state.id.clone());
        }
    }
    for (name, expr) in defined_props.iter().chain(inline.iter()) {
        let mut members = Vec::new();
        for state in &system_doc.states {
            let holds = expr.eval(&state.assign).map_err(|e| FormatError::Proposition {
                name: name.clone(),
                message: e.to_string(),
            })?;
            if holds {
                members.push(state.id.clone());
            }
        }
        labeling.insert(name.clone(), members);
    }

    let states = system_doc.states.iter().map(|s| s.id.clone()).collect();
    let (system, warnings) = build_system(states, system_doc.transitions.clone(), labeling)?;

    let tree = match tree_shape {
        Some(tree) => {
            if let Some(error) = tree.validate().into_iter().next() {
                return Err(error.into());
            }
            Some(tree)
        }
        None => None,
    };

    Ok(CompiledModel {
        system,
        tree,
        warnings,
    })
}

fn is_reserved(name: &str) -> bool {
    name == "true" || name == "false"
}

fn validate_variables(doc: &SystemDocument) -> Result<(), FormatError> {
    for (name, values) in &doc.variables {
        if values.is_empty() {
            return Err(FormatError::Variable {
                name: name.clone(),
                message: "no values declared".to_string(),
            });
        }
        let mut seen = BTreeSet::new();
        for value in values {
            if !seen.insert(value) {
                return Err(FormatError::Variable {
                    name: name.clone(),
                    message: format!("duplicate value `{value}`"),
                });
            }
        }
    }
    Ok(())
}

fn validate_states(doc: &SystemDocument) -> Result<(), FormatError> {
    for state in &doc.states {
        for (var, value) in &state.assign {
            let Some(values) = doc.variables.get(var) else {
                return Err(FormatError::State {
                    id: state.id.clone(),
                    message: format!("assignment for undeclared variable `{var}`"),
                });
            };
            if !values.contains(value) {
                return Err(FormatError::State {
                    id: state.id.clone(),
                    message: format!("variable `{var}` has undeclared value `{value}`"),
                });
            }
        }
        for var in doc.variables.keys() {
            if !state.assign.contains_key(var) {
                return Err(FormatError::State {
                    id: state.id.clone(),
                    message: format!("missing assignment for variable `{var}`"),
                });
            }
        }
    }
    Ok(())
}

/// Every comparison must target a declared variable and one of its values;
/// catching `pos == rom2` here beats a silently empty label set.
fn check_comparisons(
    expr: &PropExpr,
    variables: &BTreeMap<String, Vec<String>>,
) -> Result<(), String> {
    for (var, value) in expr.comparisons() {
        let Some(values) = variables.get(var) else {
            return Err(format!("unknown variable `{var}`"));
        };
        if !values.iter().any(|v| v == value) {
            return Err(format!(
                "variable `{var}` is compared with undeclared value `{value}`"
            ));
        }
    }
    Ok(())
}

fn convert_tree(
    node: &TreeDocument,
    path: &NodePath,
    universe: &BTreeSet<String>,
    doc: &SystemDocument,
    inline: &mut BTreeMap<String, PropExpr>,
) -> Result<AttackTree, FormatError> {
    let pre = resolve_condition(node.pre.as_deref().unwrap_or("true"), universe, doc, inline)?;
    let post = resolve_condition(&node.post, universe, doc, inline)?;
    let goal = Goal::new(pre, post);
    match (&node.op, node.children.is_empty()) {
        (None, true) => Ok(AttackTree::leaf(goal)),
        (Some(op_text), false) => {
            let op = parse_operator(op_text)?;
            let children = node
                .children
                .iter()
                .enumerate()
                .map(|(i, child)| convert_tree(child, &path.child(i), universe, doc, inline))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AttackTree::composed(goal, op, children))
        }
        _ => Err(FormatError::OpChildrenMismatch {
            path: path.to_string(),
        }),
    }
}

fn parse_operator(text: &str) -> Result<Operator, FormatError> {
    match text.to_ascii_uppercase().as_str() {
        "OR" => Ok(Operator::Or),
        "AND" => Ok(Operator::And),
        "SAND" => Ok(Operator::Sand),
        _ => Err(FormatError::UnknownOperator(text.to_string())),
    }
}

/// A goal condition is either a known proposition name or an inline
/// expression; inline expressions are interned under their trimmed source
/// text and later labeled like any defined proposition.
fn resolve_condition(
    text: &str,
    universe: &BTreeSet<String>,
    doc: &SystemDocument,
    inline: &mut BTreeMap<String, PropExpr>,
) -> Result<String, FormatError> {
    let trimmed = text.trim();
    if universe.contains(trimmed) || inline.contains_key(trimmed) {
        return Ok(trimmed.to_string());
    }
    let bare_name = !trimmed.is_empty()
        && trimmed.chars().all(|c| c.is_alphanumeric() || c == '_');
    if bare_name {
        return Err(FormatError::GoalCondition {
            text: trimmed.to_string(),
            message: "unknown proposition".to_string(),
        });
    }
    let expr = PropExpr::parse(trimmed).map_err(|e| FormatError::GoalCondition {
        text: trimmed.to_string(),
        message: e.to_string(),
    })?;
    check_comparisons(&expr, &doc.variables).map_err(|message| FormatError::GoalCondition {
        text: trimmed.to_string(),
        message,
    })?;
    inline.insert(trimmed.to_string(), expr);
    Ok(trimmed.to_string())
}
