import json
import os

import pytest

from btquot.cli import main
from btquot.field import field_of_order
from btquot.poly import parse_poly


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def parse_polymat(text, q):
    f = field_of_order(q)
    rows = text.strip()[2:-2].split("],[")
    return [[parse_poly(e, f) for e in row.split(",")] for row in rows]


def test_build_dot_small(capsys):
    rc, out, err = run(capsys, "build", "--q", "2", "--g", "t^2", "--format", "dot")
    assert rc == 0
    assert out.startswith("graph ")
    assert sum(1 for line in out.splitlines() if line.strip().startswith("v") and "[label=" in line) == 20
    assert sum(1 for line in out.splitlines() if " -- " in line) == 24
    assert "level sizes  8 12" in err


@pytest.mark.parametrize("q,g,want", [(3, "t^2", 1), (2, "t^2", 2), (3, "t^2+t", 2)])
def test_build_component_counts(capsys, q, g, want):
    rc, out, _ = run(capsys, "build", "--q", str(q), "--g", g, "--variant", "pgl-m", "--format", "json")
    assert rc == 0
    obj = json.loads(out)
    assert max(obj["components"]) + 1 == want


def test_build_p_k_equivalent_to_q(capsys):
    _, a, _ = run(capsys, "build", "--q", "4", "--g", "t^2", "--format", "json")
    _, b, _ = run(capsys, "build", "--p", "2", "--k", "2", "--g", "t^2", "--format", "json")
    assert a == b


def test_build_deterministic_bytes(capsys, tmp_path):
    paths = [tmp_path / f"x{i}.json" for i in range(2)]
    for p in paths:
        rc, out, _ = run(capsys, "build", "--q", "3", "--g", "t^2+t", "--variant", "pgl-bar",
                         "--format", "json", "--output", str(p))
        assert rc == 0 and "components" in out
    assert paths[0].read_bytes() == paths[1].read_bytes()
    _, d1, _ = run(capsys, "build", "--q", "2", "--g", "t^3", "--mode", "identity", "--format", "dot")
    _, d2, _ = run(capsys, "build", "--q", "2", "--g", "t^3", "--mode", "identity", "--format", "dot")
    assert d1 == d2


@pytest.mark.parametrize("argv", [
    ["build", "--q", "2", "--g", "t^2+"],
    ["build", "--q", "6", "--g", "t^2"],
    ["build", "--p", "4", "--g", "t^2"],
    ["build", "--q", "2", "--g", "2*t^2"],
    ["build", "--q", "2", "--g", "1"],
    ["build", "--q", "2", "--g", "t^2", "--budget", "0"],
    ["build", "--q", "2", "--g", "t^2", "--variant", "gl2"],
    ["table1", "--q", "2", "--n", "1"],
    ["table1", "--q", "2", "--n", "x"],
    ["check", "--q", "2"],
    ["lift", "--q", "2", "--g", "t^2", "--matrix", "[[1,1],[1,1"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 1


def test_budget_exit_2_and_no_partial_file(capsys, tmp_path):
    out = tmp_path / "big.json"
    rc, _, err = run(capsys, "build", "--q", "4", "--g", "t^3", "--budget", "10", "--format", "json",
                     "--output", str(out))
    assert rc == 2 and "budget" in err
    assert os.listdir(tmp_path) == []


def test_missing_output_dir_rejected_before_work(capsys, tmp_path):
    rc, _, err = run(capsys, "build", "--q", "2", "--g", "t^2", "--format", "json",
                     "--output", str(tmp_path / "nope" / "x.json"))
    assert rc == 1 and "does not exist" in err


@pytest.mark.parametrize("q,g,m", [
    (2, "t^2", "[[0,1],[1,0]]"),
    (3, "t^2", "[[t+1,0],[0,2*t+1]]"),
    (2, "t^3", "[[t^2+t+1,t],[t^2,t+1]]"),
    (5, "t^2+1", "[[2,t],[0,3]]"),
])
def test_lift_examples(capsys, q, g, m):
    rc, out, _ = run(capsys, "lift", "--q", str(q), "--g", g, "--matrix", m)
    assert rc == 0
    f = field_of_order(q)
    gp = parse_poly(g, f)
    (a, b), (c, d) = parse_polymat(out, q)
    assert a * d - b * c == parse_poly("1", f)
    (a0, b0), (c0, d0) = parse_polymat(m, q)
    for x, y in [(a, a0), (b, b0), (c, c0), (d, d0)]:
        assert (x - y) % gp == parse_poly("0", f)


def test_lift_rejects_non_sl2(capsys):
    rc, _, err = run(capsys, "lift", "--q", "2", "--g", "t^2", "--matrix", "[[t,0],[0,t]]")
    assert rc == 1 and "determinant" in err


def test_table1_rows(capsys):
    rc, out, _ = run(capsys, "table1", "--q", "2", "--n", "2-4", "--format", "json")
    assert rc == 0
    rows = json.loads(out)
    assert [(r["C"], r["C_tilde"]) for r in rows] == [(1, 2), (4, 8), (8, 16)]
    assert all("seconds" not in r for r in rows)
    rc, out, _ = run(capsys, "table1", "--q", "8", "--q", "3", "--n", "2", "--format", "json")
    rows = json.loads(out)
    assert [(r["q"], r["C"], r["C_tilde"]) for r in rows] == [(8, 1, 8), (3, 1, 1)]


def test_table1_text_is_reproducible(capsys):
    _, a, _ = run(capsys, "table1", "--q", "2", "--n", "2", "3")
    _, b, _ = run(capsys, "table1", "--q", "2", "--n", "2", "3")
    assert a == b
    assert "CONJECTURE-NOT-APPLICABLE" in a and "CONJECTURE-CONSISTENT" in a


def test_iso_outputs(capsys):
    rc, out, _ = run(capsys, "iso", "--q", "3", "--g", "t^2")
    assert rc == 0 and out.startswith("ISO:")
    rc, out, _ = run(capsys, "iso", "--q", "2", "--g", "t^2", "--format", "json")
    obj = json.loads(out)
    assert obj["isomorphic"] is False
    rc, out, _ = run(capsys, "iso", "--q", "2", "--g", "t^2", "--variant2", "pgl-bar", "--format", "json")
    obj = json.loads(out)
    assert obj["isomorphic"] is True and sorted(obj["mapping"]) == list(range(20))


def test_check_single_ring(capsys):
    rc, out, _ = run(capsys, "check", "--q", "3", "--g", "t^2+t", "--samples", "20")
    assert rc == 0
    assert out.splitlines()[-1] == "all checks passed"
    assert "pgl-m components 2 = square-class index 2" in out


def test_check_default_grid(capsys):
    rc, out, _ = run(capsys, "check", "--samples", "50")
    assert rc == 0, out
    assert [line.split()[1] for line in out.splitlines() if line.startswith(("PASS", "FAIL"))] == [
        "degree-profile", "formulas", "components", "st-identity", "connectivity", "bound-refutation", "lift"]
