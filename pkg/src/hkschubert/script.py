"""A small declarative language for towers, bundles and integrals.

One statement per line, Python expression syntax, evaluated by walking the
syntax tree with a fixed vocabulary (no ``eval``)::

    P = proj(9)
    U1, Q = bundles(P)
    G = flag(P, Q, [3, 6])
    U41, Q = bundles(G)
    X = zero(G, dual(U1 * ext(2, U41) + U1 * U41 * Q))
    h = c(X, 1, dual(U1))
    emit("int_h6", integral(X, h**6))

Integer division of two integers gives an exact rational.  ``emit`` marks
named results; ``assert`` statements abort the run when false.
"""
from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from gmpy2 import mpq

from .chern import BundleExpr, Det, Dual, Ext, Sym, Trivial
from .ring import RingClass
from .variety import (Variety, class_equal, euler_characteristic, grassmannian, integral,
                      make_flag_bundle, make_zero_locus, point, schubert_cycle, tangent_bundle)

__all__ = ["ScriptError", "ScriptResult", "run_script", "run_script_file", "VOCABULARY"]


class ScriptError(RuntimeError):
    pass


@dataclass
class ScriptResult:
    values: list = field(default_factory=list)   # (name, value) in emission order
    env: dict = field(default_factory=dict)

    def get(self, name: str):
        for k, v in self.values:
            if k == name:
                return v
        raise KeyError(name)


def _flag(base, carrier=None, ranks=None):
    if ranks is None:
        # flag(n, ranks) over the point
        base, carrier, ranks = point(), base, carrier
    return make_flag_bundle(base, carrier, list(ranks))


def _proj(n, base=None):
    return make_flag_bundle(base or point(), Trivial(n + 1), [1, n])


def _c(v: Variety, i: int, e: BundleExpr) -> RingClass:
    return v.c(int(i), e)


def _chern(v: Variety, e: BundleExpr) -> RingClass:
    return v.chern(e).total_class()


def _equal(v: Variety, a, b) -> bool:
    a = a if isinstance(a, RingClass) else v.ring.scalar(a)
    b = b if isinstance(b, RingClass) else v.ring.scalar(b)
    return class_equal(v, a, b)


def _integral(v: Variety, a) -> Any:
    if not isinstance(a, RingClass):
        a = v.ring.scalar(a)
    val = integral(v, a)
    return int(val) if val.denominator == 1 else val


def _rank(v: Variety, e: BundleExpr) -> int:
    return v.chern(e).rank


VOCABULARY: dict[str, Callable] = {
    "point": point,
    "flag": _flag,
    "proj": _proj,
    "grass": lambda k, n: grassmannian(k, n),
    "bundles": lambda v: v.bundles(),
    "zero": make_zero_locus,
    "dual": Dual,
    "ext": lambda k, e: Ext(int(k), e),
    "sym": lambda k, e: Sym(int(k), e),
    "det": Det,
    "trivial": Trivial,
    "c": _c,
    "chern": _chern,
    "rank": _rank,
    "tangent": tangent_bundle,
    "cotangent": lambda v: Dual(tangent_bundle(v)),
    "integral": _integral,
    "schubert": lambda v, lam: schubert_cycle(v, list(lam)),
    "equal": _equal,
    "chi": euler_characteristic,
    "dim": lambda v: v.dim,
}


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return mpq(a, b)
    return a / b


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: _div, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos, ast.Not: operator.not_}
_CMPS = {ast.Eq: operator.eq, ast.NotEq: operator.ne}


class _Interp:
    def __init__(self, env: dict | None = None):
        self.env = dict(env or {})
        self.result = ScriptResult(env=self.env)

    def run(self, source: str) -> ScriptResult:
        try:
            tree = ast.parse(source, mode="exec")
        except SyntaxError as e:
            raise ScriptError(f"line {e.lineno}: syntax error") from e
        for stmt in tree.body:
            try:
                self.stmt(stmt)
            except ScriptError:
                raise
            except Exception as e:
                raise ScriptError(f"line {stmt.lineno}: {type(e).__name__}: {e}") from e
        return self.result

    def stmt(self, s):
        if isinstance(s, ast.Assign) and len(s.targets) == 1:
            self.bind(s.targets[0], self.expr(s.value))
        elif isinstance(s, ast.Assert):
            if not self.expr(s.test):
                raise ScriptError(f"line {s.lineno}: assertion failed")
        elif isinstance(s, ast.Expr) and isinstance(s.value, ast.Call) \
                and isinstance(s.value.func, ast.Name) and s.value.func.id == "emit":
            args = [self.expr(a) for a in s.value.args]
            if len(args) != 2 or not isinstance(args[0], str):
                raise ScriptError(f"line {s.lineno}: emit takes a name and a value")
            self.result.values.append((args[0], args[1]))
        else:
            raise ScriptError(f"line {s.lineno}: unsupported statement")

    def bind(self, target, value):
        if isinstance(target, ast.Name):
            self.env[target.id] = value
        elif isinstance(target, ast.Tuple):
            value = tuple(value)
            if len(value) != len(target.elts):
                raise ScriptError(f"line {target.lineno}: cannot unpack {len(value)} values")
            for t, v in zip(target.elts, value):
                self.bind(t, v)
        else:
            raise ScriptError(f"line {target.lineno}: unsupported assignment target")

    def expr(self, e):
        if isinstance(e, ast.Constant) and isinstance(e.value, (int, str)) and not isinstance(e.value, bool):
            return e.value
        if isinstance(e, ast.Name):
            if e.id in ("True", "False"):
                return e.id == "True"
            if e.id in self.env:
                return self.env[e.id]
            raise ScriptError(f"line {e.lineno}: unknown name {e.id!r}")
        if isinstance(e, ast.BinOp) and type(e.op) in _BINOPS:
            return _BINOPS[type(e.op)](self.expr(e.left), self.expr(e.right))
        if isinstance(e, ast.UnaryOp) and type(e.op) in _UNOPS:
            return _UNOPS[type(e.op)](self.expr(e.operand))
        if isinstance(e, (ast.Tuple, ast.List)):
            return tuple(self.expr(x) for x in e.elts)
        if isinstance(e, ast.BoolOp) and isinstance(e.op, ast.And):
            return all(self.expr(x) for x in e.values)
        if isinstance(e, ast.Compare) and len(e.ops) == 1 and type(e.ops[0]) in _CMPS:
            return _CMPS[type(e.ops[0])](self.expr(e.left), self.expr(e.comparators[0]))
        if isinstance(e, ast.Call) and isinstance(e.func, ast.Name) and not e.keywords:
            fn = VOCABULARY.get(e.func.id)
            if fn is None:
                raise ScriptError(f"line {e.lineno}: unknown function {e.func.id!r}")
            return fn(*[self.expr(a) for a in e.args])
        raise ScriptError(f"line {getattr(e, 'lineno', '?')}: unsupported expression")


def run_script(source: str, env: dict | None = None) -> ScriptResult:
    return _Interp(env).run(source)


def run_script_file(path) -> ScriptResult:
    return run_script(Path(path).read_text())
