"""Smoke test for the Python bindings against the bundled fixtures.

Run from anywhere after `pip install -e . --no-build-isolation`:

    python3 python/smoke.py
"""

from pathlib import Path

import atc

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def read(name: str) -> str:
    return (FIXTURES / name).read_text()


def main() -> None:
    model = atc.Model(read("sys_b.json"), read("tree1.json"))
    assert "10 states" in repr(model), repr(model)
    assert model.tree_nodes()[:3] == ["root", "0", "1"]
    assert set(atc.PROPERTIES) == {
        "non-empty",
        "admissible",
        "meet",
        "under",
        "over",
        "match",
    }

    root = model.check_node("match")
    assert root["verdict"] == "holds", root
    assert root["engine"] == "under-then-over", root

    reports = model.check_global("match")
    failing = [r["node"] for r in reports if r["verdict"] == "fails"]
    assert failing == ["1"], reports
    evidence = next(r["evidence"] for r in reports if r["node"] == "1")
    assert evidence[0] == "e0p" and evidence[-1] == "e7", evidence

    oracle = model.check_node("match", engine="oracle")
    assert oracle["verdict"] == root["verdict"]

    modified = atc.Model(read("sys_c.json"), read("tree2.json"))
    over = modified.check_node("over")
    assert over["verdict"] == "fails" and over["evidence"] == ["e8", "e9"], over
    assert modified.check_node("under")["verdict"] == "holds"

    chain = atc.Model(read("sys_a.json"))
    assert '"e0" -> "e1"' in chain.to_dot()
    assert chain.label("outside_ready") == ["e0"]

    loops = atc.Model(
        read("sys_a_prime.json"),
        '{"pre": "outside_ready_window_closed", "post": "room2_undetected"}',
    )
    members = loops.node_members(max_states=11)
    assert len(members) == 2, members
    assert members[0] == ["e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7"], members
    assert members[1][2:6] == ["e2", "e3", "e4", "e3"], members

    cnf = read("sat_example.cnf")
    system_json, tree_json = atc.reduce_dimacs(cnf)
    reduced = atc.Model(system_json, tree_json)
    admissible = reduced.check_node("admissible", max_and_arity=4)
    assert (admissible["verdict"] == "holds") == atc.truth_table_sat(cnf)

    try:
        model.check_node("match", node="1", max_and_arity=1)
    except RuntimeError:
        pass
    else:
        raise AssertionError("arity cap should raise RuntimeError")

    print("smoke: OK")


if __name__ == "__main__":
    main()
