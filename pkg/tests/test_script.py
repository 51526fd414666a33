import pytest
from gmpy2 import mpq

from hkschubert.script import ScriptError, run_script


def test_basic_tower():
    r = run_script("G = grass(2, 4)\nU, Q = bundles(G)\nemit('deg', integral(G, schubert(G, [1])**4))\n"
                   "emit('half', 1/2)\nemit('same', equal(G, c(G, 1, Q), schubert(G, [1])))")
    assert r.values == [("deg", 2), ("half", mpq(1, 2)), ("same", True)]
    assert r.get("half") == mpq(1, 2)


def test_relative_flag_and_zero_locus():
    r = run_script("P = proj(4)\nL, Q = bundles(P)\nX = zero(P, sym(3, dual(L)))\n"
                   "G = flag(X, Q, [2, 2])\nemit('dim', dim(G))\nemit('rk', rank(X, ext(2, Q)))")
    assert r.get("dim") == 7 and r.get("rk") == 6


@pytest.mark.parametrize("src", [
    "import os",
    "x = __import__('os')",
    "x = open('f')",
    "x = (1).real",
    "x = y",
    "assert 1 == 2",
    "emit(1, 2)",
    "a, b = (1, 2, 3)",
    "x = [i for i in (1, 2)]",
    "x = 1 +",
])
def test_rejected_programs(src):
    with pytest.raises(ScriptError):
        run_script(src)


def test_errors_carry_line_numbers():
    with pytest.raises(ScriptError, match="line 2"):
        run_script("G = grass(2, 4)\nX = flag(G, 7, [1, 1])")
