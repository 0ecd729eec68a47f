//! CNF satisfiability as tree admissibility.
//!
//! A formula over variables `1..=r` becomes a layered system: a `start`
//! state, then one layer per variable holding its two literal states. Every
//! path from `start` picks one literal per layer, i.e. a (partial) truth
//! assignment. Clause `j` labels its literal states with `cj`, and the tree
//! asks for a path that `AND`-decomposes into one `start >> cj` factor per
//! clause. Such a path exists exactly when some assignment satisfies every
//! clause, so the formula is satisfiable iff the root is admissible.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::format::{StateDocument, SystemDocument, TreeDocument};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// A CNF formula. Literals are DIMACS-style: variable `v` is the positive
/// literal `v` and the negative literal `-v`, with `1 <= v <= variables`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub variables: usize,
    pub clauses: Vec<Vec<i32>>,
}

/// Parses the DIMACS CNF format: `c` comment lines, one `p cnf <vars>
/// <clauses>` header, then 0-terminated clauses that may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError {
                    line: line_no,
                    message: "duplicate header".to_string(),
                });
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", vars, count] => vars
                    .parse::<usize>()
                    .ok()
                    .zip(count.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| DimacsError {
                line: line_no,
                message: format!("malformed header `{trimmed}`; expected `p cnf <vars> <clauses>`"),
            })?);
            continue;
        }
        let Some((variables, _)) = header else {
            return Err(DimacsError {
                line: line_no,
                message: "clause before `p cnf` header".to_string(),
            });
        };
        for token in trimmed.split_whitespace() {
            let literal = token.parse::<i32>().map_err(|_| DimacsError {
                line: line_no,
                message: format!("invalid literal `{token}`"),
            })?;
            if literal == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                let var = literal.unsigned_abs() as usize;
                if var > variables {
                    return Err(DimacsError {
                        line: line_no,
                        message: format!(
                            "literal `{literal}` out of range; header declares {variables} variable(s)"
                        ),
                    });
                }
                current.push(literal);
            }
        }
    }
    let Some((variables, declared)) = header else {
        return Err(DimacsError {
            line: last_line,
            message: "missing `p cnf` header".to_string(),
        });
    };
    if !current.is_empty() {
        return Err(DimacsError {
            line: last_line,
            message: "unterminated clause at end of input".to_string(),
        });
    }
    if clauses.len() != declared {
        return Err(DimacsError {
            line: last_line,
            message: format!(
                "header declares {declared} clause(s), found {}",
                clauses.len()
            ),
        });
    }
    Ok(CnfInstance { variables, clauses })
}

fn literal_state(literal: i32) -> String {
    let var = literal.unsigned_abs();
    if literal > 0 {
        format!("x{var}")
    } else {
        format!("nx{var}")
    }
}

fn clause_prop(index: usize) -> String {
    format!("c{}", index + 1)
}

/// Builds the system and tree documents encoding `cnf`.
///
/// The root is admissible in the produced system iff `cnf` is satisfiable.
/// With `m` clauses the root is an `AND` of arity `max(m, 2)` (a single
/// clause is duplicated to keep the tree well formed; a clause-free formula
/// degenerates to a plain leaf, which is trivially admissible).
pub fn reduce(cnf: &CnfInstance) -> (SystemDocument, TreeDocument) {
    let r = cnf.variables;
    let m = cnf.clauses.len();

    // props[state] = clause markers holding there.
    let mut props: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (j, clause) in cnf.clauses.iter().enumerate() {
        for &literal in clause {
            props
                .entry(literal_state(literal))
                .or_default()
                .push(clause_prop(j));
        }
    }

    let mut states = Vec::with_capacity(1 + 2 * r);
    let mut start_props = vec!["start".to_string()];
    if r == 0 {
        start_props.push("done".to_string());
    }
    states.push(StateDocument {
        id: "start".to_string(),
        assign: BTreeMap::new(),
        props: start_props,
    });
    for var in 1..=r {
        for name in [format!("x{var}"), format!("nx{var}")] {
            let mut state_props = props.remove(&name).unwrap_or_default();
            state_props.sort();
            state_props.dedup();
            if var == r {
                state_props.push("done".to_string());
            }
            states.push(StateDocument {
                id: name,
                assign: BTreeMap::new(),
                props: state_props,
            });
        }
    }

    let mut transitions = Vec::new();
    for var in 1..=r {
        let sources: Vec<String> = if var == 1 {
            vec!["start".to_string()]
        } else {
            vec![format!("x{}", var - 1), format!("nx{}", var - 1)]
        };
        for source in sources {
            transitions.push((source.clone(), format!("x{var}")));
            transitions.push((source, format!("nx{var}")));
        }
    }

    // Empty clauses label no state; define their marker explicitly so the
    // name resolves (to the empty set) instead of dangling.
    let propositions = cnf
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, clause)| clause.is_empty())
        .map(|(j, _)| (clause_prop(j), "false".to_string()))
        .collect();

    let system = SystemDocument {
        variables: BTreeMap::new(),
        states,
        transitions,
        propositions,
    };

    let clause_child = |j: usize| TreeDocument {
        pre: Some("start".to_string()),
        post: clause_prop(j),
        op: None,
        children: Vec::new(),
    };
    let mut children: Vec<TreeDocument> = (0..m).map(clause_child).collect();
    if m == 1 {
        children.push(clause_child(0));
    }
    let tree = TreeDocument {
        pre: Some("start".to_string()),
        post: "done".to_string(),
        op: (!children.is_empty()).then(|| "AND".to_string()),
        children,
    };

    (system, tree)
}

/// Reference satisfiability decision by exhaustive assignment enumeration.
pub fn truth_table_sat(cnf: &CnfInstance) -> bool {
    assert!(
        cnf.variables <= 24,
        "truth table enumeration is exponential; {} variables is too many",
        cnf.variables
    );
    (0..1u64 << cnf.variables).any(|bits| {
        cnf.clauses.iter().all(|clause| {
            clause.iter().any(|&literal| {
                let var = literal.unsigned_abs() as usize - 1;
                let value = bits >> var & 1 == 1;
                if literal > 0 {
                    value
                } else {
                    !value
                }
            })
        })
    })
}
