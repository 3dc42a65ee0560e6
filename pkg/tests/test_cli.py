import json
import subprocess
import sys
from pathlib import Path

import pytest

from regcomb import corpus
from regcomb import expr as ex
from regcomb.ccra import Cascade
from regcomb.cli import (EXIT_PARSE, EXIT_SEMANTIC, EXIT_USAGE, ResourceLimitError, cmd_check_equiv,
                         cmd_run, load_operand, main, parse_surface)
from regcomb.compile import compile, load_cascade

SHUFFLE_SST = str(corpus.corpus_path("shuffle_sst.json"))
FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    return cmd_run(list(argv))


def test_eval_examples():
    assert run("eval", "-e", "sum (a/1 |> b/0)", "-i", "abab") == (0, "2\n")
    assert run("eval", "-m", SHUFFLE_SST, "-i", "abab") == (0, "ab\n")
    assert run("eval", "-f", "corpus:coffee", "-i", "CCSC#C", "-i", "C") == (0, "5\n2\n")
    assert run("eval", "-f", "corpus:shuffle", "-i", "ab") == (0, "bot\n")


def test_eval_string_values_are_raw():
    code, out = run("eval", "-e", 'sum (a/"x" |> b/"")', "-i", "aba")
    assert (code, out) == (0, "xx\n")


def test_monoid_and_alphabet_flags():
    assert run("eval", "-e", "a*/ab", "--monoid", "str", "-i", "aa") == (0, "ab\n")
    assert run("eval", "-e", "a*/1", "--alphabet", "ab", "-i", "b") == (0, "bot\n")


def test_check_equiv_examples():
    rep = cmd_check_equiv(load_operand("corpus:shuffle"), load_operand("corpus:shuffle_sst"), 8)
    assert rep.equivalent and str(rep).startswith("equivalent up to 8")
    rep = cmd_check_equiv(parse_surface("sum a/1"), parse_surface("sum a/2"), 1)
    assert not rep.equivalent and rep.counterexample == "a"
    assert (rep.lhs_value, rep.rhs_value) == (1, 2)
    assert str(rep) == 'counterexample "a": 1 != 2'
    e = corpus.expression("swap")
    assert cmd_check_equiv(e, e, 5).equivalent


def test_check_equiv_expression_against_compiled_cascade():
    for name in ["copy", "strip", "shuffle"]:
        e = corpus.expression(name)
        assert cmd_check_equiv(e, compile(e), 6).equivalent


def test_check_equiv_exit_codes():
    code, out = run("check-equiv", "sum a/1", "sum a/2", "--max-len", "1")
    assert code == EXIT_SEMANTIC and out.startswith("counterexample")
    code, out = run("check-equiv", "corpus:shuffle", SHUFFLE_SST, "--max-len", "6")
    assert code == 0 and out == "equivalent up to 6 (127 strings)\n"


def test_resource_limit():
    with pytest.raises(ResourceLimitError):
        cmd_check_equiv(parse_surface("sum a/1"), parse_surface("sum a/1"), 10, alphabet="ab", limit=100)
    code, _ = run("check-equiv", "corpus:id", "corpus:id", "--max-len", "30")
    assert code == EXIT_SEMANTIC


def test_alphabet_mismatch():
    with pytest.raises(ex.ExprError):
        cmd_check_equiv(parse_surface("sum a/1"), parse_surface("sum (a/1 |> b/1)"), 2)


def test_exit_codes(capsys):
    assert run("eval", "-e", "sum (a/1 |>", "-i", "a")[0] == EXIT_PARSE
    assert run("eval", "-e", "sum a/1", "-i", "b")[0] == EXIT_SEMANTIC
    assert run("frobnicate")[0] == EXIT_USAGE
    assert run("eval", "-e", "a/1")[0] == EXIT_USAGE  # missing -i
    assert run("eval", "-e", "a/1", "-m", SHUFFLE_SST, "-i", "a")[0] == EXIT_USAGE
    assert run("eval", "-m", "/nonexistent/machine.json", "-i", "a")[0] == EXIT_USAGE
    assert run("eval", "-f", "corpus:nope", "-i", "a")[0] == EXIT_USAGE
    assert run("compile", "-e", 'chain[a*b] (sum a/"a" (+) b/"") + (a|b)*/""')[0] == EXIT_SEMANTIC
    bad = str(FIXTURES / "bad_shared_source.json")
    assert run("eval", "-m", bad, "-i", "a")[0] == EXIT_SEMANTIC
    assert "regcomb:" in capsys.readouterr().err


def test_compile_emits_loadable_cascade(tmp_path):
    out = tmp_path / "c.json"
    code, text = run("compile", "-f", "corpus:strip", "-o", str(out))
    assert (code, text) == (0, "")
    c = load_cascade(json.loads(out.read_text()))
    assert isinstance(c, Cascade) and c("ab#a") == "ab"
    code, _ = run("check-equiv", "corpus:strip", str(out), "--max-len", "5")
    assert code == 0
    code, dot = run("compile", "-f", "corpus:strip", "--dot")
    assert code == 0 and dot.startswith("digraph")


def test_domain_command():
    code, out = run("domain", "-f", "corpus:strip")
    assert code == 0
    d = parse_surface(out.strip() + "/0", alphabet="ab#").dfa
    e = corpus.expression("strip")
    ev = ex.Evaluator(e)
    from oracles import words
    for w in words("ab#", 5):
        assert d.accepts(w) == (ev(e, w) is not ex.BOT)
    code, out = run("domain", "-f", "corpus:strip", "--json")
    assert code == 0 and set(json.loads(out)) == {"alphabet", "start", "accepting", "delta"}


def test_dot_command():
    code, out = run("dot", "-m", "corpus:crossing")
    assert code == 0 and out.startswith("digraph machine")
    code, out = run("dot", "-e", "sum a/1")
    assert code == 0 and "stage0" in out


@pytest.mark.parametrize("cmd,machine", [("extract-comm", "corpus:flow_acra"),
                                         ("extract-noncomm", "corpus:crossing")])
def test_extract_commands_round_trip(cmd, machine, capsys):
    code, out = run(cmd, "-m", machine, "--max-len", "4")
    assert code == 0
    assert "self-check: equivalent up to 4" in capsys.readouterr().err
    e = corpus.load_expression_text(out)
    m = corpus.machine(machine.split(":")[1])
    assert cmd_check_equiv(e, m, 5).equivalent


def test_extract_noncomm_skip_normalize():
    code, _ = run("extract-noncomm", "-m", "corpus:crossing", "--skip-normalize", "--max-len", "0")
    assert code == EXIT_SEMANTIC
    code, _ = run("extract-noncomm", "-m", "corpus:echo", "--skip-normalize", "--max-len", "3")
    assert code == 0


def test_main_and_module_entry_point(capsys):
    assert main(["eval", "-e", "sum (a/1 |> b/0)", "-i", "abab"]) == 0
    assert capsys.readouterr().out == "2\n"
    p = subprocess.run([sys.executable, "-m", "regcomb", "eval", "-m", SHUFFLE_SST, "-i", "abab"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "ab\n"
    p = subprocess.run([sys.executable, "-m", "regcomb", "eval", "-e", "(", "-i", "a"],
                       capture_output=True, text=True)
    assert p.returncode == EXIT_PARSE
