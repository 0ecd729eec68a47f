//! Python bindings: a `Model` wrapping one system plus an optional tree,
//! with the checkers, the enumeration oracle, DOT export, and the DIMACS
//! reduction exposed as plain functions and dict-shaped reports.

use std::str::FromStr;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

use atc_core::dot::{system_dot, tree_dot};
use atc_core::oracle::{oracle_report, oracle_semantics};
use atc_core::satgen;
use atc_core::{
    load_model, load_system, AttackTree, CheckError, CheckReport, Checker, GoalExpression,
    NodePath, PropertyKind, SearchConfig, TransitionSystem,
};

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Cap overruns become `RuntimeError` so callers can distinguish "raise the
/// limit" from "fix the input"; everything else is a `ValueError`.
fn check_error(err: CheckError) -> PyErr {
    match &err {
        CheckError::AndArityExceeded { .. } | CheckError::CandidateBudgetExhausted(_) => {
            PyRuntimeError::new_err(err.to_string())
        }
        _ => value_error(err),
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn parse_property(name: &str) -> PyResult<PropertyKind> {
    PropertyKind::from_str(name).map_err(PyValueError::new_err)
}

fn parse_node(selector: &str) -> PyResult<NodePath> {
    NodePath::from_str(selector).map_err(value_error)
}

/// One system with an optional attack tree, loaded from JSON documents.
#[pyclass(module = "atc")]
struct Model {
    system: TransitionSystem,
    tree: Option<AttackTree>,
    /// Non-fatal findings from loading, e.g. states without successors.
    #[pyo3(get)]
    warnings: Vec<String>,
}

impl Model {
    fn tree_ref(&self) -> PyResult<&AttackTree> {
        self.tree
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("model was loaded without a tree"))
    }

    fn report(
        &self,
        node: &NodePath,
        property: PropertyKind,
        engine: &str,
        budget: Option<usize>,
        max_and_arity: usize,
    ) -> PyResult<CheckReport> {
        let tree = self.tree_ref()?;
        match engine {
            "exact" => {
                let config = SearchConfig {
                    max_and_arity,
                    ..SearchConfig::default()
                };
                Checker::with_config(&self.system, tree, config)
                    .check_node(node, property)
                    .map_err(check_error)
            }
            "oracle" => {
                oracle_report(&self.system, tree, node, property, budget).map_err(check_error)
            }
            other => Err(PyValueError::new_err(format!(
                "unknown engine `{other}`; expected `exact` or `oracle`"
            ))),
        }
    }
}

#[pymethods]
impl Model {
    #[new]
    #[pyo3(signature = (system_json, tree_json=None))]
    fn new(system_json: &str, tree_json: Option<&str>) -> PyResult<Self> {
        let (system, tree, warnings) = match tree_json {
            Some(tree_json) => {
                let compiled = load_model(system_json, tree_json).map_err(value_error)?;
                (compiled.system, compiled.tree, compiled.warnings)
            }
            None => {
                let (system, warnings) = load_system(system_json).map_err(value_error)?;
                (system, None, warnings)
            }
        };
        Ok(Model {
            system,
            tree,
            warnings: warnings.iter().map(|w| w.to_string()).collect(),
        })
    }

    fn __repr__(&self) -> String {
        let tree = match &self.tree {
            Some(t) => format!("tree of {} nodes", t.size()),
            None => "no tree".to_string(),
        };
        format!(
            "<Model: {} states, {} transitions, {tree}>",
            self.system.state_count(),
            self.system.transition_count()
        )
    }

    /// State names in declaration order.
    fn states(&self) -> Vec<String> {
        self.system
            .states()
            .map(|s| self.system.state_name(s).to_string())
            .collect()
    }

    fn transitions(&self) -> Vec<(String, String)> {
        self.system
            .transitions()
            .map(|(a, b)| {
                (
                    self.system.state_name(a).to_string(),
                    self.system.state_name(b).to_string(),
                )
            })
            .collect()
    }

    fn propositions(&self) -> Vec<String> {
        self.system.propositions().map(str::to_string).collect()
    }

    /// States labeled with `prop`, in declaration order.
    fn label(&self, prop: &str) -> PyResult<Vec<String>> {
        let set = self.system.label_set(prop).map_err(value_error)?;
        Ok(set
            .iter()
            .map(|s| self.system.state_name(s).to_string())
            .collect())
    }

    /// Preorder node selectors of the tree.
    fn tree_nodes(&self) -> PyResult<Vec<String>> {
        Ok(self
            .tree_ref()?
            .all_nodes()
            .iter()
            .map(NodePath::to_string)
            .collect())
    }

    /// Checks `property` at `node`; returns the report as a dict with the
    /// same fields as the CLI's JSON output.
    #[pyo3(signature = (property, node="root", engine="exact", budget=None, max_and_arity=4))]
    fn check_node<'py>(
        &self,
        py: Python<'py>,
        property: &str,
        node: &str,
        engine: &str,
        budget: Option<usize>,
        max_and_arity: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let property = parse_property(property)?;
        let node = parse_node(node)?;
        let report = self.report(&node, property, engine, budget, max_and_arity)?;
        json_to_py(py, &report.to_json(&self.system))
    }

    /// Checks `property` at every applicable node, in preorder.
    #[pyo3(signature = (property, engine="exact", budget=None, max_and_arity=4))]
    fn check_global<'py>(
        &self,
        py: Python<'py>,
        property: &str,
        engine: &str,
        budget: Option<usize>,
        max_and_arity: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let property = parse_property(property)?;
        let tree = self.tree_ref()?;
        let nodes = if property.needs_refinement() {
            tree.composed_nodes()
        } else {
            tree.all_nodes()
        };
        let reports = nodes
            .iter()
            .map(|node| self.report(node, property, engine, budget, max_and_arity))
            .collect::<PyResult<Vec<_>>>()?;
        let values: Vec<Value> = reports.iter().map(|r| r.to_json(&self.system)).collect();
        json_to_py(py, &Value::Array(values))
    }

    /// Every member of a node's semantics with at most `max_states` state
    /// occurrences, as lists of state names. `refinement=False` enumerates
    /// the node goal instead of the refinement expression.
    #[pyo3(signature = (node="root", max_states=8, refinement=true))]
    fn node_members(
        &self,
        node: &str,
        max_states: usize,
        refinement: bool,
    ) -> PyResult<Vec<Vec<String>>> {
        let tree = self.tree_ref()?;
        let node = parse_node(node)?;
        let (goal, expr) = tree.expression_at(&node).map_err(value_error)?;
        let expr = match expr {
            Some(expr) if refinement => expr,
            _ => GoalExpression::Atomic(goal),
        };
        let members = oracle_semantics(&self.system, &expr, max_states).map_err(value_error)?;
        Ok(members
            .iter()
            .map(|p| p.names(&self.system).iter().map(|n| n.to_string()).collect())
            .collect())
    }

    /// Graphviz DOT text: the system digraph, then the tree digraph when a
    /// tree is loaded. Byte-identical across runs.
    fn to_dot(&self) -> String {
        let mut out = system_dot(&self.system);
        if let Some(tree) = &self.tree {
            out.push_str(&tree_dot(tree));
        }
        out
    }
}

/// Reduces a DIMACS CNF text to `(system_json, tree_json)` whose root
/// admissibility equals satisfiability.
#[pyfunction]
fn reduce_dimacs(text: &str) -> PyResult<(String, String)> {
    let cnf = satgen::parse_dimacs(text).map_err(value_error)?;
    let (system_doc, tree_doc) = satgen::reduce(&cnf);
    let mut system_json = serde_json::to_string_pretty(&system_doc).expect("plain data");
    system_json.push('\n');
    let mut tree_json = serde_json::to_string_pretty(&tree_doc).expect("plain data");
    tree_json.push('\n');
    Ok((system_json, tree_json))
}

/// Brute-force satisfiability of a DIMACS CNF text (up to 24 variables).
#[pyfunction]
fn truth_table_sat(text: &str) -> PyResult<bool> {
    let cnf = satgen::parse_dimacs(text).map_err(value_error)?;
    if cnf.variables > 24 {
        return Err(PyValueError::new_err(format!(
            "{} variables is beyond the truth-table limit of 24",
            cnf.variables
        )));
    }
    Ok(satgen::truth_table_sat(&cnf))
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(reduce_dimacs, m)?)?;
    m.add_function(wrap_pyfunction!(truth_table_sat, m)?)?;
    m.add(
        "PROPERTIES",
        PropertyKind::ALL.map(|p| p.as_str()).to_vec(),
    )?;
    Ok(())
}
