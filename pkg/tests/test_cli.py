import json
import shlex

import pytest

from lgrp.cli import EXAMPLES, main

ALL_EXAMPLES = [ex for exs in EXAMPLES.values() for ex in exs]


def run(capsys, line):
    argv = shlex.split(line)
    assert argv[0] == "lgrp"
    code = main(argv[1:])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("line", ALL_EXAMPLES)
def test_documented_examples_run(capsys, line):
    code, out, err = run(capsys, line)
    assert code == 0, err
    assert out.strip()
    if "--json" in line:
        for row in out.splitlines():
            json.loads(row)


def test_every_subcommand_has_examples(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for name, exs in EXAMPLES.items():
        assert name in out
        assert len(exs) >= 2, name


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_help_shows_examples(capsys, name):
    assert main([name, "--help"]) == 0
    out = capsys.readouterr().out
    assert "examples:" in out and EXAMPLES[name][0] in out


def test_json_integers_are_strings(capsys):
    code, out, _ = run(capsys, 'lgrp refute --lhs "x \\/ y" --rhs "x * y" --instance Z --json')
    assert code == 0
    data = json.loads(out)
    values = json.dumps(data)
    assert '"1"' in values
    assert not any(isinstance(v, int) and not isinstance(v, bool) for v in _leaves(data))


def test_large_box_round_trips_exactly(capsys):
    code, out, _ = run(capsys, "lgrp laws --instance Z --box 2305843009213693951 --samples 50 --json")
    assert code == 0
    assert all(r["status"] == "pass" for r in map(json.loads, out.splitlines()))


def _leaves(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _leaves(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _leaves(v)
    else:
        yield obj


@pytest.mark.parametrize("line, code", [
    ("lgrp laws --instance Z --samples 0", 2),
    ("lgrp laws --instance W", 2),
    ("lgrp laws --instance Z --box -1", 2),
    ("lgrp laws --instance Z --box 4611686018427387904", 2),
    ("lgrp nf 'x \\/'", 2),
    ("lgrp nf '(x \\/ y \\/ z) * (x \\/ y \\/ z) * (x \\/ y \\/ z)' --budget 10", 3),
    ("lgrp polar --instance 'lex(Z,Z)' --support 0", 2),
    ("lgrp nosuch", 2),
    ("lgrp suite --only laws,internal_group_Z --expect internal_group_Z=pass", 1),
    ("lgrp suite --only nosuch", 2),
    ("lgrp suite --expect laws=maybe --list", 2),
])
def test_exit_codes(capsys, line, code):
    got, _, err = run(capsys, line)
    assert got == code
    if code:
        assert err.strip()


def test_mismatch_summary_on_stderr(capsys):
    code, out, err = run(capsys, "lgrp suite --only internal_group_Z --expect internal_group_Z=pass --json")
    assert code == 1
    assert json.loads(out)["match"] is False
    assert "internal_group_Z" in err and "observed fail-with-witness" in err


def test_nf_output(capsys):
    code, out, _ = run(capsys, 'lgrp nf "(x /\\ y)^-1"')
    assert code == 0 and "x^-1 \\/ y^-1" in out
