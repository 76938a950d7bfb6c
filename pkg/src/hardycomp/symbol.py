"""Analytic self-maps of the unit disk described by a small expression language.

Grammar::

    expr    := "identity" | "half_plus" | "power(" int ")" | "dilation(" real ")"
             | "rot(" real ")" | "const(" complex ")" | "poly(" complex {"," complex} ")"
             | "mobius(" complex ")" | "blaschke(" complex {"," complex} ")"
             | "compose(" expr "," expr ")"
    complex := real [("+"|"-") real "i"]

``compose(f, g)`` is ``f o g``.  ``mobius(a)`` is the involution
``(a - z) / (1 - conj(a) z)`` and ``blaschke(a1, ..., am)`` is the product of
those involutions.

Every symbol the grammar can produce is a rational function whose poles lie
off the closed disk, so evaluation on the unit circle is the continuous
extension and the maximum principle reduces self-map validation to a boundary
check.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .exceptions import (
    BoundaryTraceError,
    ParameterRangeError,
    SelfMapError,
    SymbolSyntaxError,
)

N_SELFMAP = 4096
TOL_SELFMAP = 1e-9


# --------------------------------------------------------------------------
# AST nodes


class Node:
    """Expression-tree node.  Subclasses implement ``eval`` and ``rational``."""

    def eval(self, z):  # pragma: no cover - abstract
        raise NotImplementedError

    def rational(self):  # pragma: no cover - abstract
        """Return ascending (numerator, denominator) coefficient arrays."""
        raise NotImplementedError

    def text(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return _fmt_real(c.real)
    sign = "-" if c.imag < 0 or (c.imag == 0 and math.copysign(1, c.imag) < 0) else "+"
    return f"{_fmt_real(c.real)}{sign}{_fmt_real(abs(c.imag))}i"


@dataclass(frozen=True)
class Identity(Node):
    def eval(self, z):
        return np.asarray(z, dtype=complex)

    def rational(self):
        return np.array([0, 1], dtype=complex), np.array([1], dtype=complex)

    def text(self):
        return "identity"


@dataclass(frozen=True)
class HalfPlus(Node):
    def eval(self, z):
        return (1 + np.asarray(z, dtype=complex)) / 2

    def rational(self):
        return np.array([0.5, 0.5], dtype=complex), np.array([1], dtype=complex)

    def text(self):
        return "half_plus"


@dataclass(frozen=True)
class Power(Node):
    n: int

    def eval(self, z):
        return np.asarray(z, dtype=complex) ** self.n

    def rational(self):
        num = np.zeros(self.n + 1, dtype=complex)
        num[-1] = 1
        return num, np.array([1], dtype=complex)

    def text(self):
        return f"power({self.n})"


@dataclass(frozen=True)
class Dilation(Node):
    r: float

    def eval(self, z):
        return self.r * np.asarray(z, dtype=complex)

    def rational(self):
        return np.array([0, self.r], dtype=complex), np.array([1], dtype=complex)

    def text(self):
        return f"dilation({_fmt_real(self.r)})"


@dataclass(frozen=True)
class Rotation(Node):
    theta: float

    def eval(self, z):
        return np.exp(1j * self.theta) * np.asarray(z, dtype=complex)

    def rational(self):
        return np.array([0, np.exp(1j * self.theta)]), np.array([1], dtype=complex)

    def text(self):
        return f"rot({_fmt_real(self.theta)})"


@dataclass(frozen=True)
class Constant(Node):
    c: complex

    def eval(self, z):
        return np.full(np.shape(z), self.c, dtype=complex)

    def rational(self):
        return np.array([self.c], dtype=complex), np.array([1], dtype=complex)

    def text(self):
        return f"const({_fmt_complex(self.c)})"


@dataclass(frozen=True)
class Poly(Node):
    coeffs: tuple

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def rational(self):
        return np.array(self.coeffs, dtype=complex), np.array([1], dtype=complex)

    def text(self):
        return "poly(" + ", ".join(_fmt_complex(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class Mobius(Node):
    a: complex

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a - z) / (1 - np.conj(self.a) * z)

    def rational(self):
        a = complex(self.a)
        return np.array([a, -1], dtype=complex), np.array([1, -a.conjugate()], dtype=complex)

    def text(self):
        return f"mobius({_fmt_complex(self.a)})"


@dataclass(frozen=True)
class Blaschke(Node):
    zeros: tuple

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for a in self.zeros:
            out = out * (a - z) / (1 - np.conj(a) * z)
        return out

    def rational(self):
        num = np.array([1], dtype=complex)
        den = np.array([1], dtype=complex)
        for a in self.zeros:
            a = complex(a)
            num = P.polymul(num, [a, -1])
            den = P.polymul(den, [1, -a.conjugate()])
        return num, den

    def text(self):
        return "blaschke(" + ", ".join(_fmt_complex(a) for a in self.zeros) + ")"


@dataclass(frozen=True)
class Compose(Node):
    outer: Node
    inner: Node

    def eval(self, z):
        return self.outer.eval(self.inner.eval(z))

    def rational(self):
        p, q = self.outer.rational()
        a, b = self.inner.rational()
        d = max(len(p), len(q)) - 1
        # clear denominators: sum_k p_k A^k B^(d-k)
        a_pows = [np.array([1], dtype=complex)]
        b_pows = [np.array([1], dtype=complex)]
        for _ in range(d):
            a_pows.append(P.polymul(a_pows[-1], a))
            b_pows.append(P.polymul(b_pows[-1], b))

        def clear(coeffs):
            out = np.array([0], dtype=complex)
            for k, c in enumerate(coeffs):
                if c != 0:
                    out = P.polyadd(out, c * P.polymul(a_pows[k], b_pows[d - k]))
            return out

        return clear(p), clear(q)

    def text(self):
        return f"compose({self.outer.text()}, {self.inner.text()})"


# --------------------------------------------------------------------------
# Symbol


def _trim(c, rel=1e-14):
    c = np.asarray(c, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        return np.array([0], dtype=complex)
    last = len(c) - 1
    while last > 0 and abs(c[last]) <= rel * scale:
        last -= 1
    return c[: last + 1]


@dataclass(frozen=True)
class Symbol:
    """A validated analytic self-map of the disk.

    Instances are immutable; ``symbol(z)`` evaluates with domain checks and
    :meth:`extended` evaluates the rational continuation without them.
    """

    node: Node
    closed_disk: bool = True
    nonconstant: bool = True
    boundary_max: float = field(default=float("nan"), compare=False)

    @property
    def text(self) -> str:
        return self.node.text()

    def __str__(self):
        return self.text

    def __call__(self, z, tol: float = 1e-12):
        z = np.asarray(z, dtype=complex)
        mod = np.abs(z)
        if np.any(mod > 1 + tol):
            raise ValueError("evaluation point outside the closed unit disk")
        if not self.closed_disk and np.any(mod >= 1 - tol):
            raise BoundaryTraceError("boundary trace required for this symbol")
        return self.node.eval(z)

    def extended(self, z):
        return self.node.eval(np.asarray(z, dtype=complex))

    def rational(self):
        """Cleared (numerator, denominator) polynomials, ascending order."""
        num, den = self.node.rational()
        return _trim(num), _trim(den)

    @property
    def degree(self) -> int:
        num, den = self.rational()
        return max(len(num), len(den)) - 1

    def poles(self):
        _, den = self.rational()
        if len(den) < 2:
            return np.array([], dtype=complex)
        return P.polyroots(den)

    def boundary(self, theta):
        return boundary_trace(self, theta)


def make_symbol(node: Node, n_selfmap: int = N_SELFMAP, tol: float = TOL_SELFMAP,
                closed_disk: bool = True) -> Symbol:
    """Wrap ``node`` in a Symbol after numerical self-map validation."""
    theta = 2 * np.pi * np.arange(n_selfmap) / n_selfmap
    vals = node.eval(np.exp(1j * theta))
    if not np.all(np.isfinite(vals)):
        raise SelfMapError("symbol has a pole on the unit circle")
    bmax = float(np.max(np.abs(vals)))
    if bmax > 1 + tol:
        raise SelfMapError(f"boundary modulus {bmax:.12g} exceeds 1 + {tol:g}")
    probe = np.array([0, 0.3, -0.41j, 0.5 + 0.2j, -0.6 - 0.1j, 0.77j])
    pv = node.eval(probe)
    nonconstant = bool(np.max(np.abs(pv - pv[0])) > 1e-12 or np.ptp(np.abs(vals - vals[0])) > 1e-12)
    if not nonconstant and abs(pv[0]) >= 1:
        raise SelfMapError("constant symbol of modulus >= 1 does not map into the open disk")
    return Symbol(node, closed_disk=closed_disk, nonconstant=nonconstant, boundary_max=bmax)


def compose(outer: Symbol, inner: Symbol) -> Symbol:
    return make_symbol(Compose(outer.node, inner.node))


def rotate(phi: Symbol, theta: float) -> Symbol:
    """``rot(theta) o phi``."""
    return make_symbol(Compose(Rotation(theta), phi.node))


def center_at_origin(phi: Symbol) -> Symbol:
    """Post-compose with the involution exchanging 0 and ``phi(0)``."""
    c = complex(phi.extended(0.0))
    if c == 0:
        return phi
    return make_symbol(Compose(Mobius(c), phi.node))


# --------------------------------------------------------------------------
# Parser

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(_REAL)
_NAME_RE = re.compile(r"[A-Za-z_]+")


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def error(self, msg):
        raise SymbolSyntaxError(msg, self.i)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def expect(self, ch):
        self.ws()
        if self.i >= len(self.s) or self.s[self.i] != ch:
            self.error(f"expected {ch!r}")
        self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def real(self) -> float:
        self.ws()
        m = _REAL_RE.match(self.s, self.i)
        if not m:
            self.error("expected a real number")
        self.i = m.end()
        return float(m.group())

    def integer(self) -> int:
        self.ws()
        m = re.compile(r"[+-]?\d+").match(self.s, self.i)
        if not m:
            self.error("expected an integer")
        nxt = self.s[m.end(): m.end() + 1]
        if nxt in (".", "e", "E"):
            self.error("expected an integer")
        self.i = m.end()
        return int(m.group())

    def complex_(self) -> complex:
        re_part = self.real()
        self.ws()
        if self.peek() == "i":
            self.i += 1
            return complex(0.0, re_part)
        save = self.i
        if self.peek() in ("+", "-"):
            sign = 1.0 if self.s[self.i] == "+" else -1.0
            self.i += 1
            self.ws()
            m = _REAL_RE.match(self.s, self.i)
            if m and not m.group().startswith(("+", "-")):
                self.i = m.end()
                self.ws()
                if self.peek() == "i":
                    self.i += 1
                    return complex(re_part, sign * float(m.group()))
            self.i = save
            self.error("malformed complex literal")
        return complex(re_part, 0.0)

    def complex_list(self):
        vals = [self.complex_()]
        while self.peek() == ",":
            self.i += 1
            vals.append(self.complex_())
        return vals

    def expr(self) -> Node:
        self.ws()
        start = self.i
        m = _NAME_RE.match(self.s, self.i)
        if not m:
            self.error("expected a symbol name")
        name = m.group()
        self.i = m.end()
        if name == "identity":
            return Identity()
        if name == "half_plus":
            return HalfPlus()
        self.expect("(")
        if name == "power":
            n = self.integer()
            if n < 0:
                self.i = start
                raise ParameterRangeError("power exponent must be nonnegative")
            node = Power(n)
        elif name == "dilation":
            r = self.real()
            if abs(r) > 1:
                raise ParameterRangeError(f"dilation factor {r:g} has modulus > 1")
            node = Dilation(r)
        elif name == "rot":
            node = Rotation(self.real())
        elif name == "const":
            c = self.complex_()
            if abs(c) >= 1:
                raise ParameterRangeError(f"constant of modulus {abs(c):g} >= 1 leaves the disk")
            node = Constant(c)
        elif name == "poly":
            node = Poly(tuple(self.complex_list()))
        elif name == "mobius":
            a = self.complex_()
            if abs(a) >= 1:
                raise ParameterRangeError(f"mobius parameter has modulus {abs(a):g} >= 1")
            node = Mobius(a)
        elif name == "blaschke":
            zs = self.complex_list()
            for a in zs:
                if abs(a) >= 1:
                    raise ParameterRangeError(f"blaschke zero has modulus {abs(a):g} >= 1")
            node = Blaschke(tuple(zs))
        elif name == "compose":
            outer = self.expr()
            self.expect(",")
            inner = self.expr()
            node = Compose(outer, inner)
        else:
            self.i = start
            self.error(f"unknown symbol {name!r}")
        self.expect(")")
        return node


def parse_node(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    p.ws()
    if p.i != len(text):
        p.error("trailing input")
    return node


def parse_symbol(text: str, n_selfmap: int = N_SELFMAP, tol: float = TOL_SELFMAP) -> Symbol:
    """Parse and validate a symbol expression.

    Raises SymbolSyntaxError, ParameterRangeError or SelfMapError.
    """
    return make_symbol(parse_node(text), n_selfmap=n_selfmap, tol=tol)


def eval_symbol(phi: Symbol, z):
    return phi(z)


# --------------------------------------------------------------------------
# Boundary values


def default_ladder(m_max: int = 20) -> np.ndarray:
    return 1.0 - 2.0 ** -np.arange(1, m_max + 1)


def _ladder_limit(vals, ladder, tol):
    """Radial limit from samples along the ladder.

    One Richardson step in the gap ``1 - r`` (first-order convergence); the
    change between the last two extrapolants is the error estimate.
    Returns ``(limit, ok)``.
    """
    if len(ladder) < 3:
        raise ValueError("radius ladder needs at least three rungs")
    gaps = 1 - np.asarray(ladder)
    h1, h2, h3 = gaps[-1], gaps[-2], gaps[-3]
    ex1 = (h2 * vals[-1] - h1 * vals[-2]) / (h2 - h1)
    ex2 = (h3 * vals[-2] - h2 * vals[-3]) / (h3 - h2)
    err = np.abs(ex1 - ex2)
    ok = np.isfinite(err) & (err <= tol * np.maximum(1.0, np.abs(ex1)))
    return ex1, ok


def _ladder_values(phi, theta, ladder):
    ladder = default_ladder() if ladder is None else np.asarray(ladder, dtype=float)
    if np.any(np.diff(ladder) <= 0):
        raise ValueError("radius ladder must be increasing")
    xi = np.exp(1j * theta)
    return np.stack([phi.node.eval(r * xi) for r in ladder]), ladder


def boundary_trace(phi: Symbol, theta, ladder: Sequence[float] | None = None,
                   tol: float = 1e-10):
    """Radial limit of ``phi`` at ``exp(i theta)``.

    Symbols holomorphic on the closed disk return the continuous extension.
    Otherwise ``phi`` is evaluated along ``r exp(i theta)`` for the radius
    ladder and extrapolated to ``r = 1``; the estimate must be stable to ``tol``.
    """
    theta = np.asarray(theta, dtype=float)
    if phi.closed_disk:
        return phi.node.eval(np.exp(1j * theta))
    vals, ladder = _ladder_values(phi, theta, ladder)
    lim, ok = _ladder_limit(vals, ladder, tol)
    if not np.all(ok):
        bad = np.atleast_1d(theta)[np.atleast_1d(~ok)]
        raise BoundaryTraceError(f"radial limit undetected at theta={bad[:3].tolist()}")
    return lim


def boundary_trace_masked(phi: Symbol, theta, ladder=None, tol: float = 1e-10):
    """Like :func:`boundary_trace` but returns (values, ok_mask) instead of raising."""
    theta = np.asarray(theta, dtype=float)
    if phi.closed_disk:
        return phi.node.eval(np.exp(1j * theta)), np.ones(theta.shape, dtype=bool)
    vals, ladder = _ladder_values(phi, theta, ladder)
    lim, ok = _ladder_limit(vals, ladder, tol)
    return np.where(ok, lim, np.nan), ok


GALLERY = ("identity", "dilation(0.5)", "half_plus", "power(2)", "rot(1.0)", "mobius(0.5)")
