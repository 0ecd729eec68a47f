//! Graphviz rendering. Emission order is fixed (states and edges sorted by
//! name, tree nodes in preorder) so identical inputs give identical bytes.

use crate::semantics::Operator;
use crate::system::TransitionSystem;
use crate::tree::AttackTree;

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// System digraph: states annotated with their propositions (the implicit
/// `true`/`false` labels elided), edges sorted by name pair.
pub fn system_dot(system: &TransitionSystem) -> String {
    let mut out = String::from("digraph system {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    let mut names: Vec<&str> = system.states().map(|s| system.state_name(s)).collect();
    names.sort_unstable();
    for name in &names {
        let id = system.state_id(name).expect("name comes from the system");
        let props: Vec<String> = system
            .propositions()
            .filter(|p| *p != "true" && *p != "false")
            .filter(|p| system.label_set(p).expect("listed proposition").contains(id))
            .map(escape)
            .collect();
        let mut label = escape(name);
        if !props.is_empty() {
            label.push_str("\\n{");
            label.push_str(&props.join(", "));
            label.push('}');
        }
        out.push_str(&format!("  \"{}\" [label=\"{label}\"];\n", escape(name)));
    }
    let mut edges: Vec<(&str, &str)> = system
        .transitions()
        .map(|(a, b)| (system.state_name(a), system.state_name(b)))
        .collect();
    edges.sort_unstable();
    for (from, to) in edges {
        out.push_str(&format!("  \"{}\" -> \"{}\";\n", escape(from), escape(to)));
    }
    out.push_str("}\n");
    out
}

/// Tree digraph in preorder: one box per node labeled with its path, its
/// operator for composed nodes, and its goal.
pub fn tree_dot(tree: &AttackTree) -> String {
    let mut out = String::from("digraph tree {\n  node [shape=box];\n");
    for path in tree.all_nodes() {
        let node = tree.node(&path).expect("path enumerated from the tree");
        let op = node.refinement.as_ref().map(|r| match r.op {
            Operator::Or => "OR",
            Operator::And => "AND",
            Operator::Sand => "SAND",
        });
        let goal = escape(&node.goal.to_string());
        let label = match op {
            Some(op) => format!("{path} [{op}]\\n{goal}"),
            None => format!("{path}\\n{goal}"),
        };
        out.push_str(&format!("  \"{path}\" [label=\"{label}\"];\n"));
    }
    for path in tree.all_nodes() {
        let node = tree.node(&path).expect("path enumerated from the tree");
        for i in 0..node.children().len() {
            out.push_str(&format!("  \"{path}\" -> \"{}\";\n", path.child(i)));
        }
    }
    out.push_str("}\n");
    out
}
