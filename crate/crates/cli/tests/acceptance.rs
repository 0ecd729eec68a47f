//! Release gate. Each test covers one shipped guarantee end to end and
//! prints a single `name: PASS/FAIL (elapsed)` line (shown under
//! `--nocapture`), then fails loudly with the collected mismatches.

use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::process::Command;
use std::time::{Duration, Instant};

use atc_core::fixtures;
use atc_core::oracle::{for_each_path, member_definitional, oracle_report, oracle_semantics};
use atc_core::satgen::{parse_dimacs, reduce, truth_table_sat, CnfInstance};
use atc_core::semantics::path_satisfies_expression;
use atc_core::{
    compile_model, AttackTree, Checker, Goal, GoalExpression, NodePath, Operator, Path,
    PropertyKind, SearchConfig, StateId, SystemBuilder, TransitionSystem, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finish(name: &str, started: Instant, limit: Duration, mut failures: Vec<String>) {
    let elapsed = started.elapsed();
    if elapsed > limit {
        failures.push(format!("took {elapsed:.2?}, budget {limit:.2?}"));
    }
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("{name}: {status} ({elapsed:.2?})");
    assert!(
        failures.is_empty(),
        "{name} failures:\n{}",
        failures.join("\n")
    );
}

fn expect(failures: &mut Vec<String>, ok: bool, message: impl FnOnce() -> String) {
    if !ok {
        failures.push(message());
    }
}

/// Fixed verdicts on the bundled fixtures, evidence endpoints included.
#[test]
fn golden_fixture_verdicts() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let sys_b = fixtures::sys_b();
    let tree1 = fixtures::tree1();
    let checker = Checker::new(&sys_b, &tree1);
    let root = NodePath::root();
    let and_node: NodePath = "1".parse().unwrap();

    let verdict = |checker: &Checker<'_>, node: &NodePath, property| {
        checker.check_node(node, property).unwrap()
    };

    let m = verdict(&checker, &root, PropertyKind::Match);
    expect(&mut failures, m.verdict.holds(), || {
        format!("root match should hold, got {:?}", m.detail)
    });

    let over = verdict(&checker, &and_node, PropertyKind::Over);
    expect(&mut failures, over.verdict.holds(), || {
        format!("node 1 over-match should hold, got {:?}", over.detail)
    });

    let under = verdict(&checker, &and_node, PropertyKind::Under);
    expect(&mut failures, !under.verdict.holds(), || {
        "node 1 under-match should fail".to_string()
    });
    match &under.evidence {
        Some(path) => {
            let names = path.names(&sys_b);
            expect(
                &mut failures,
                names.first() == Some(&"e0p") && names.last() == Some(&"e7"),
                || format!("node 1 counterexample endpoints should be (e0p, e7), got {names:?}"),
            );
        }
        None => failures.push("node 1 under-match counterexample is missing".to_string()),
    }

    let global = checker.check_global(PropertyKind::Match).unwrap();
    let failing: Vec<String> = global
        .iter()
        .filter(|r| !r.verdict.holds())
        .map(|r| r.node.to_string())
        .collect();
    expect(&mut failures, failing == ["1"], || {
        format!("global match should fail exactly at node 1, got {failing:?}")
    });

    let sys_c = fixtures::sys_c();
    let tree2 = fixtures::tree2();
    let checker2 = Checker::new(&sys_c, &tree2);

    let under2 = verdict(&checker2, &root, PropertyKind::Under);
    expect(&mut failures, under2.verdict.holds(), || {
        format!("modified root under-match should hold, got {:?}", under2.detail)
    });

    let over2 = verdict(&checker2, &root, PropertyKind::Over);
    expect(&mut failures, !over2.verdict.holds(), || {
        "modified root over-match should fail".to_string()
    });
    let names = over2
        .evidence
        .as_ref()
        .map(|p| p.names(&sys_c))
        .unwrap_or_default();
    expect(&mut failures, names == ["e8", "e9"], || {
        format!("over-match counterexample should be exactly e8 e9, got {names:?}")
    });

    finish(
        "golden-fixture-verdicts",
        started,
        Duration::from_secs(1),
        failures,
    );
}

/// The enumerated semantics of the looping chain is exactly the two-member
/// family at budget 11 and gains the third member at 13.
#[test]
fn loop_family_semantics() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let sys = fixtures::sys_a_prime();
    let expr = GoalExpression::Atomic(Goal::new(
        "outside_ready_window_closed",
        "room2_undetected",
    ));
    let family = |k: usize| {
        let mut names = vec!["e0", "e1", "e2"];
        for _ in 0..k {
            names.push("e3");
            names.push("e4");
        }
        names.extend(["e5", "e6", "e7"]);
        Path::from_names(&sys, names).unwrap()
    };

    let got = oracle_semantics(&sys, &expr, 11).unwrap();
    expect(&mut failures, got == vec![family(1), family(2)], || {
        let mut msg = String::from("budget 11 should yield the k=1 and k=2 members, got:");
        for p in &got {
            write!(msg, " [{}]", p.display(&sys)).unwrap();
        }
        msg
    });

    let wider = oracle_semantics(&sys, &expr, 13).unwrap();
    expect(
        &mut failures,
        wider == vec![family(1), family(2), family(3)],
        || format!("budget 13 should add exactly the k=3 member, got {} paths", wider.len()),
    );

    finish(
        "loop-family-semantics",
        started,
        Duration::from_secs(1),
        failures,
    );
}

/// Admissibility of a reduced CNF instance equals truth-table
/// satisfiability, on 50 random formulas plus the bundled example.
#[test]
fn sat_reduction_bridge() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7C3);

    let mut instances: Vec<(String, CnfInstance)> = (0..50)
        .map(|i| {
            let variables = rng.random_range(1..=6);
            let clauses = (0..rng.random_range(1..=10))
                .map(|_| {
                    (0..rng.random_range(1..=3))
                        .map(|_| {
                            let var = rng.random_range(1..=variables) as i32;
                            if rng.random_bool(0.5) {
                                var
                            } else {
                                -var
                            }
                        })
                        .collect()
                })
                .collect();
            (format!("random #{i}"), CnfInstance { variables, clauses })
        })
        .collect();
    instances.push((
        "bundled example".to_string(),
        parse_dimacs(fixtures::SAT_EXAMPLE_CNF).unwrap(),
    ));

    for (label, cnf) in &instances {
        let (system_doc, tree_doc) = reduce(cnf);
        let compiled = compile_model(&system_doc, Some(&tree_doc)).unwrap();
        let tree = compiled.tree.unwrap();
        let config = SearchConfig {
            max_and_arity: cnf.clauses.len().max(4),
            ..SearchConfig::default()
        };
        let checker = Checker::with_config(&compiled.system, &tree, config);
        let admissible = checker
            .check_node(&NodePath::root(), PropertyKind::Admissible)
            .unwrap()
            .verdict
            .holds();
        let satisfiable = truth_table_sat(cnf);
        expect(&mut failures, admissible == satisfiable, || {
            format!("{label}: admissible={admissible} but satisfiable={satisfiable} ({cnf:?})")
        });
    }

    finish(
        "sat-reduction-bridge",
        started,
        Duration::from_secs(10),
        failures,
    );
}

const PROPS: [&str; 4] = ["p0", "p1", "p2", "p3"];
const GOAL_POOL: [&str; 6] = ["true", "false", "p0", "p1", "p2", "p3"];

fn random_system(rng: &mut ChaCha8Rng, max_states: usize) -> TransitionSystem {
    let n = rng.random_range(1..=max_states);
    let mut b = SystemBuilder::new();
    for i in 0..n {
        b = b.state(&format!("s{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            if rng.random_bool(0.3) {
                b = b.edge(&format!("s{i}"), &format!("s{j}"));
            }
        }
    }
    for p in PROPS {
        b = b.label(p, std::iter::empty());
        for i in 0..n {
            if rng.random_bool(0.4) {
                b = b.label(p, [format!("s{i}").as_str()]);
            }
        }
    }
    b.build().unwrap().0
}

fn random_goal(rng: &mut ChaCha8Rng) -> Goal {
    Goal::new(
        GOAL_POOL[rng.random_range(0..GOAL_POOL.len())],
        GOAL_POOL[rng.random_range(0..GOAL_POOL.len())],
    )
}

fn random_tree(rng: &mut ChaCha8Rng, op: Operator) -> AttackTree {
    let arity = rng.random_range(2..=3);
    AttackTree::composed(
        random_goal(rng),
        op,
        (0..arity).map(|_| AttackTree::leaf(random_goal(rng))).collect(),
    )
}

/// The exact engines agree with the enumeration oracle on every property
/// over 200 random system/node samples.
#[test]
fn exact_engine_matches_oracle() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0E0E);
    let ops = [Operator::Or, Operator::And, Operator::Sand];

    for i in 0..200 {
        let system = random_system(&mut rng, 5);
        let tree = random_tree(&mut rng, ops[i % ops.len()]);
        let checker = Checker::new(&system, &tree);
        let root = NodePath::root();
        for property in PropertyKind::ALL {
            let exact = checker.check_node(&root, property).unwrap();
            let oracle = oracle_report(&system, &tree, &root, property, None).unwrap();
            expect(&mut failures, exact.verdict == oracle.verdict, || {
                format!(
                    "sample {i} {property}: exact {} [{}] vs oracle {} ({:?})",
                    exact.verdict, exact.engine, oracle.verdict, oracle.detail
                )
            });
        }
        if !failures.is_empty() {
            break;
        }
    }

    finish(
        "exact-engine-matches-oracle",
        started,
        Duration::from_secs(60),
        failures,
    );
}

/// Relations between the properties, membership criteria against the
/// definitions, and cycle removal on 1000 random walks.
#[test]
fn algebraic_invariants() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA16E);
    let ops = [Operator::Or, Operator::And, Operator::Sand];

    // Match is under and over; each one-sided match forces a meet on
    // admissible nodes.
    for i in 0..150 {
        let system = random_system(&mut rng, 5);
        let tree = random_tree(&mut rng, ops[i % ops.len()]);
        let checker = Checker::new(&system, &tree);
        let root = NodePath::root();
        let holds = |property| {
            checker.check_node(&root, property).unwrap().verdict == Verdict::Holds
        };
        let (under, over, matches) = (
            holds(PropertyKind::Under),
            holds(PropertyKind::Over),
            holds(PropertyKind::Match),
        );
        expect(&mut failures, matches == (under && over), || {
            format!("sample {i}: match={matches} but under={under}, over={over}")
        });
        if holds(PropertyKind::Admissible) {
            let meet = holds(PropertyKind::Meet);
            expect(&mut failures, !(under && !meet), || {
                format!("sample {i}: admissible under-match without meet")
            });
            expect(&mut failures, !(over && !meet), || {
                format!("sample {i}: admissible over-match without meet")
            });
        }
    }

    // Closed-form membership equals definitional membership on every path
    // of size at most 8.
    for i in 0..40 {
        let system = random_system(&mut rng, 4);
        let expr = if rng.random_bool(0.25) {
            GoalExpression::Atomic(random_goal(&mut rng))
        } else {
            let arity = rng.random_range(2..=3);
            GoalExpression::composed(
                ops[i % ops.len()],
                (0..arity).map(|_| random_goal(&mut rng)).collect(),
            )
        };
        let mut disagree = None;
        let _ = for_each_path(&system, &system.full_set(), None, 9, None, |states| {
            let path = Path::new(&system, states.to_vec()).unwrap();
            let closed = path_satisfies_expression(&system, &path, &expr).unwrap();
            let definitional = member_definitional(&system, &path, &expr).unwrap();
            if closed != definitional {
                disagree = Some((path.names(&system).join(" "), closed, definitional));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        expect(&mut failures, disagree.is_none(), || {
            format!("sample {i} {expr}: membership criteria disagree: {disagree:?}")
        });
    }

    // Cycle removal: endpoints kept, result elementary, on exactly 1000
    // random walks.
    let mut walks = 0;
    'outer: loop {
        let system = random_system(&mut rng, 5);
        let ids: Vec<StateId> = system.states().collect();
        for _ in 0..25 {
            let mut states = vec![ids[rng.random_range(0..ids.len())]];
            for _ in 0..rng.random_range(0..=12) {
                let succ = system.successors(*states.last().unwrap());
                if succ.is_empty() {
                    break;
                }
                states.push(succ[rng.random_range(0..succ.len())]);
            }
            let path = Path::new(&system, states).unwrap();
            let reduced = path.remove_cycles();
            expect(
                &mut failures,
                reduced.first() == path.first() && reduced.last() == path.last(),
                || format!("cycle removal moved the endpoints of {}", path.display(&system)),
            );
            expect(&mut failures, reduced.is_elementary(), || {
                format!("cycle removal left a repeat in {}", reduced.display(&system))
            });
            walks += 1;
            if walks == 1000 {
                break 'outer;
            }
        }
    }

    finish(
        "algebraic-invariants",
        started,
        Duration::from_secs(30),
        failures,
    );
}

/// Two consecutive runs of every CLI invocation over the bundled fixtures
/// produce byte-identical stdout.
#[test]
fn cli_output_determinism() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let fixture = |name: &str| {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(name)
            .to_str()
            .unwrap()
            .to_string()
    };
    let run = |args: &[String]| {
        Command::new(env!("CARGO_BIN_EXE_atc"))
            .args(args)
            .output()
            .expect("binary runs")
            .stdout
    };

    let check = |system: &str, tree: &str, property: &str, extra: &[&str]| {
        let mut args = vec![
            "check".to_string(),
            "--system".into(),
            fixture(system),
            "--tree".into(),
            fixture(tree),
            "--property".into(),
            property.into(),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        args
    };
    let export = |system: &str, tree: Option<&str>| {
        let mut args = vec!["export-dot".to_string(), "--system".into(), fixture(system)];
        if let Some(tree) = tree {
            args.extend(["--tree".to_string(), fixture(tree)]);
        }
        args
    };

    let invocations: Vec<(&str, Vec<String>)> = vec![
        ("check b/1 text", check("sys_b.json", "tree1.json", "match", &[])),
        (
            "check b/1 json",
            check("sys_b.json", "tree1.json", "match", &["--format", "json"]),
        ),
        (
            "check b/1 oracle",
            check("sys_b.json", "tree1.json", "match", &["--engine", "oracle"]),
        ),
        (
            "check c/2 json witness",
            check(
                "sys_c.json",
                "tree2.json",
                "over",
                &["--format", "json", "--witness"],
            ),
        ),
        ("export a", export("sys_a.json", None)),
        ("export a'", export("sys_a_prime.json", None)),
        ("export b/1", export("sys_b.json", Some("tree1.json"))),
        ("export c/2", export("sys_c.json", Some("tree2.json"))),
    ];
    for (label, args) in &invocations {
        let first = run(args);
        let second = run(args);
        expect(&mut failures, first == second, || {
            format!("{label}: stdout differs between consecutive runs")
        });
        expect(&mut failures, !first.is_empty(), || {
            format!("{label}: expected output")
        });
    }

    // gen-sat: quiet stdout, but the written files must also be stable.
    let dir = std::env::temp_dir().join(format!("atc-determinism-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let gen = |tag: &str| {
        let sys = dir.join(format!("sys-{tag}.json"));
        let tree = dir.join(format!("tree-{tag}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_atc"))
            .args([
                "gen-sat",
                "--cnf",
                &fixture("sat_example.cnf"),
                "--system-out",
                sys.to_str().unwrap(),
                "--tree-out",
                tree.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        (
            out.stdout,
            std::fs::read(&sys).unwrap(),
            std::fs::read(&tree).unwrap(),
        )
    };
    let first = gen("a");
    let second = gen("b");
    expect(&mut failures, first == second, || {
        "gen-sat runs are not byte-identical".to_string()
    });
    std::fs::remove_dir_all(&dir).ok();

    finish(
        "cli-output-determinism",
        started,
        Duration::from_secs(30),
        failures,
    );
}
