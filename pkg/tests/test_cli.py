import json
import os

import pytest

from kposet.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_estimate_writes_csv(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code, _, _ = run(
        capsys, "estimate", "--poset", "nat", "--max-len", "12",
        "--fuel", "256", "--t-budget", "256", "--window", "4",
        "--ranks", "8", "--out", str(out),
    )
    assert code == 0
    text = out.read_text()
    lines = text.strip().split("\n")
    assert lines[0].startswith("# config:")
    assert lines[2].startswith("rank,")
    data_rows = lines[3:]
    assert len(data_rows) == 8  # one row per requested rank
    assert any(row.endswith("ok") for row in data_rows)
    # byte identical rerun
    out2 = tmp_path / "t2.csv"
    run(
        capsys, "estimate", "--poset", "nat", "--max-len", "12",
        "--fuel", "256", "--t-budget", "256", "--window", "4",
        "--ranks", "8", "--out", str(out2),
    )
    assert out2.read_text() == text


def test_estimate_zero_ranks(tmp_path, capsys):
    out = tmp_path / "empty.csv"
    code, _, _ = run(
        capsys, "estimate", "--poset", "nat", "--max-len", "6",
        "--fuel", "64", "--t-budget", "64", "--window", "2",
        "--ranks", "0", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[-1].startswith("rank,")  # header only, no data rows


def test_estimate_bad_poset(capsys):
    code, _, err = run(capsys, "estimate", "--poset", "weird", "--ranks", "2")
    assert code == 2
    assert "weird" in err


def test_quotient_identity(capsys):
    code, out, _ = run(
        capsys, "quotient", "--regex", "(a+b)*·b", "--alphabet", "ab",
        "--m-words", "a",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[1] == "t,quotient"
    final = lines[-1].split(",")[1]
    assert final == lines[2].split(",")[1]


def test_quotient_epsilon_identity(capsys):
    code, out, _ = run(
        capsys, "quotient", "--regex", "a·b", "--alphabet", "ab",
        "--m-words", "",
    )
    assert code == 0
    final = out.strip().split("\n")[-1].split(",", 1)[1]
    assert final == "a·b"


def test_quotient_trace_length_bound(capsys):
    code, out, _ = run(
        capsys, "quotient", "--regex", "(a+b)*·b", "--alphabet", "ab",
        "--m-words", "a,ab,aab,b,ba",
    )
    assert code == 0
    lines = out.strip().split("\n")[2:-1]
    values = []
    for line in lines:
        v = line.split(",", 1)[1]
        if not values or values[-1] != v:
            values.append(v)
    # distinct values bounded by state count + 1
    assert len(values) <= 5


def test_quotient_bad_regex(capsys):
    code, _, err = run(
        capsys, "quotient", "--regex", "((", "--alphabet", "ab", "--m-words", "a"
    )
    assert code == 2
    assert "well-formed" in err


def test_conditions_star(capsys):
    code, out, _ = run(
        capsys, "conditions", "--pair", "prefix:ab/lexico:a<b", "--k", "3",
    )
    assert code == 0
    data = json.loads(out)
    assert data["witness"] == ["aa", "ab", "b"]


def test_conditions_dagger_absent(capsys):
    code, out, _ = run(
        capsys, "conditions", "--pair", "lexico:a<b/lexico:a<b", "--k", "1",
        "--condition", "dagger", "--fragment", "6",
    )
    assert code == 0
    assert json.loads(out)["witness"] is None


def test_conditions_bad_pair(capsys):
    code, _, _ = run(capsys, "conditions", "--pair", "nat", "--k", "2")
    assert code == 2


def test_conditions_fragment_ceiling(capsys):
    code, _, err = run(
        capsys, "conditions", "--pair", "prefix:ab/lexico:a<b", "--k", "2",
        "--fragment", "20",
    )
    assert code == 3
    assert "subset search" in err


def test_diagonal_byte_identical(capsys):
    argv = [
        "diagonal", "--pair", "prefix:ab/lexico:a<b", "--i", "2",
        "--max-len", "8", "--fuel", "128", "--t-budget", "128", "--window", "4",
    ]
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_dilworth(tmp_path, capsys):
    f = tmp_path / "butterfly.json"
    f.write_text(json.dumps({
        "elements": ["a", "b", "c", "d"],
        "lt": [[0, 2], [0, 3], [1, 2], [1, 3]],
    }))
    code, out, _ = run(capsys, "dilworth", "--file", str(f))
    assert code == 0
    data = json.loads(out)
    assert data["antichain_size"] == 2
    assert data["cover_size"] == 2
    assert data["dilworth_equal"] is True
    assert sorted(e for chain in data["chains"] for e in chain) == ["a", "b", "c", "d"]


def test_dilworth_missing_file(capsys):
    code, _, _ = run(capsys, "dilworth", "--file", "/nonexistent.json")
    assert code == 2


def test_diagonal(capsys):
    code, out, _ = run(
        capsys, "diagonal", "--pair", "prefix:ab/lexico:a<b", "--i", "1",
        "--max-len", "8", "--fuel", "128", "--t-budget", "128", "--window", "4",
    )
    assert code == 0
    data = json.loads(out)
    assert data["audit"]["passed"] is True
    assert data["audit"]["z_size"] == 8


def test_bb_table(capsys):
    code, out, _ = run(capsys, "bb", "--states", "1", "--t-max", "20")
    assert code == 0
    lines = out.strip().split("\n")
    rows = [line.split(",") for line in lines[2:]]
    by_n = {}
    for n, t, v in rows:
        by_n.setdefault(int(n), []).append(int(v))
    for n, vals in by_n.items():
        assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert set(by_n) == {0, 1}


def test_bb_resource_ceiling(capsys):
    code, _, err = run(capsys, "bb", "--states", "9", "--t-max", "5")
    assert code == 3
    assert "bounded" in err


def test_cardre(capsys):
    from kposet.codec import b_index
    from kposet.vm import assemble

    prog = assemble(["INC_A", "OUT", "INC_A", "OUT", "HALT"])
    code, out, _ = run(
        capsys, "cardre", "--program", prog, "--t-max", "10",
    )
    assert code == 0
    rows = [line.split(",") for line in out.strip().split("\n")[2:]]
    counts = [int(v) for _, v in rows]
    assert counts[-1] == 2
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_interact(capsys):
    from kposet.vm import assemble

    prog = assemble(["INC_A", "OUT", "INC_A", "INC_A", "OUT", "HALT"])
    code, out, _ = run(
        capsys, "interact", "--mode", "cap", "--program", prog,
        "--x", "1,2", "--t-budget", "32",
    )
    assert code == 0
    data = json.loads(out)
    assert data["limit"] == [1]
    assert data["status"] == "stabilized-within-budget"
    code, out, _ = run(
        capsys, "interact", "--mode", "setminus", "--program", prog,
        "--x", "1,2", "--t-budget", "32",
    )
    assert json.loads(out)["limit"] == [2]


def test_interact_needs_program(capsys):
    code, _, _ = run(capsys, "interact", "--mode", "cap", "--x", "1")
    assert code == 2
