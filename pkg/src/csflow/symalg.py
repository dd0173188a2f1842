"""Exact multivariate polynomials and first-order holomorphic differential operators.

Polynomials carry rational (`fractions.Fraction`) coefficients by default so
that every algebraic identity in the package is checked exactly; complex
coefficients are accepted for the dynamics layer, where symbolic operator
tables get contracted with numeric Hamiltonian coefficients.

A :class:`DiffOp` is an operator ``P(z) + sum_b Q_b(z) d/dz_b`` acting on
holomorphic functions.  Commutators of two such operators are again first
order; the quadratic terms of the composition cancel pairwise and the
implementation asserts that cancellation instead of assuming it.
"""

from __future__ import annotations

from fractions import Fraction as Q
from typing import Iterable, Mapping, Union

Coef = Union[Q, int, float, complex]
Monomial = tuple[tuple[str, int], ...]

_ZERO_KEY: Monomial = ()


def _coef(c: Coef) -> Coef:
    if isinstance(c, bool):
        raise TypeError("boolean is not a polynomial coefficient")
    if isinstance(c, int):
        return Q(c)
    return c


def _coef_str(c: Coef) -> str:
    if isinstance(c, Q):
        return str(c)
    if isinstance(c, complex):
        return "(%.17g%+.17gj)" % (c.real, c.imag)
    return "%.17g" % c


class MultiPoly:
    """Polynomial in named commuting variables with exact normal form.

    Terms are stored as ``{monomial: coefficient}`` where a monomial is a
    sorted tuple of ``(variable, exponent)`` pairs; zero coefficients are
    never stored, so two equal polynomials compare equal structurally.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Coef] | None = None):
        clean: dict[Monomial, Coef] = {}
        if terms:
            for mono, c in terms.items():
                c = _coef(c)
                if c == 0:
                    continue
                clean[mono] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "MultiPoly":
        return cls()

    @classmethod
    def const(cls, c: Coef) -> "MultiPoly":
        return cls({_ZERO_KEY: c})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MultiPoly":
        if power < 0:
            raise ValueError("negative powers are not polynomials")
        if power == 0:
            return cls.const(1)
        return cls({((name, power),): Q(1)})

    @staticmethod
    def coerce(x: "MultiPoly | Coef") -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        return MultiPoly.const(x)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "MultiPoly | Coef") -> "MultiPoly":
        other = MultiPoly.coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0) + c
            if s == 0:
                out.pop(mono, None)
            else:
                out[mono] = s
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly | Coef") -> "MultiPoly":
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other: Coef) -> "MultiPoly":
        return MultiPoly.coerce(other) - self

    def __mul__(self, other: "MultiPoly | Coef") -> "MultiPoly":
        other = MultiPoly.coerce(other)
        out: dict[Monomial, Coef] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _merge_monomials(m1, m2)
                s = out.get(mono, 0) + c1 * c2
                if s == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = s
        return MultiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        out = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, complex, Q)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution -----------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        out: dict[Monomial, Coef] = {}
        for mono, c in self.terms.items():
            for i, (v, e) in enumerate(mono):
                if v == name:
                    rest = mono[:i] + ((v, e - 1),) + mono[i + 1 :] if e > 1 else mono[:i] + mono[i + 1 :]
                    out[rest] = out.get(rest, 0) + c * e
                    break
        return MultiPoly(out)

    def subs(self, mapping: Mapping[str, "MultiPoly | Coef"]) -> "MultiPoly":
        """Substitute polynomials (or constants) for variables."""
        out = MultiPoly.zero()
        cache = {v: MultiPoly.coerce(p) for v, p in mapping.items()}
        for mono, c in self.terms.items():
            term = MultiPoly.const(c)
            for v, e in mono:
                term = term * (cache[v] ** e if v in cache else MultiPoly.var(v, e))
            out = out + term
        return out

    def substitute_zero(self, name: str) -> "MultiPoly":
        return self.subs({name: 0})

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        out: dict[Monomial, Coef] = {}
        for mono, c in self.terms.items():
            new = tuple(sorted((mapping.get(v, v), e) for v, e in mono))
            if len({v for v, _ in new}) != len(new):
                raise ValueError("variable renaming is not injective on this polynomial")
            out[new] = out.get(new, 0) + c
        return MultiPoly(out)

    def eval(self, values: Mapping[str, complex]) -> complex:
        total: complex = 0
        for mono, c in self.terms.items():
            prod: complex = complex(c) if not isinstance(c, Q) else float(c)
            for v, e in mono:
                prod *= values[v] ** e
            total += prod
        return total

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self) -> int:
        """Total degree; zero polynomial has degree -1 by convention."""
        if not self.terms:
            return -1
        return max(sum(e for _, e in mono) for mono in self.terms)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        if not self.terms:
            return -1
        return max(sum(e for v, e in mono if v in names) for mono in self.terms)

    def homogeneous_degree(self, names: Iterable[str] | None = None) -> int | None:
        """Common degree of all terms (in the given variables), else None."""
        if not self.terms:
            return 0
        names = None if names is None else set(names)
        degs = {
            sum(e for v, e in mono if names is None or v in names)
            for mono in self.terms
        }
        return degs.pop() if len(degs) == 1 else None

    def constant_term(self) -> Coef:
        return self.terms.get(_ZERO_KEY, Q(0))

    # -- rendering ---------------------------------------------------------

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=_term_order):
            factors = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not factors:
                parts.append(_coef_str(c))
            elif c == 1:
                parts.append(factors)
            elif c == -1:
                parts.append(f"-{factors}")
            else:
                parts.append(f"{_coef_str(c)}*{factors}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")

    __str__ = render

    def __repr__(self) -> str:
        return f"MultiPoly({self.render()})"


def _merge_monomials(m1: Monomial, m2: Monomial) -> Monomial:
    exps: dict[str, int] = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _term_order(item):
    mono, _ = item
    return (sum(e for _, e in mono), mono)


ZERO = MultiPoly.zero()
ONE = MultiPoly.const(1)


class DiffOp:
    """First-order operator ``scalar + sum_b partials[b] * d/db``."""

    __slots__ = ("scalar", "partials")

    def __init__(
        self,
        scalar: MultiPoly | Coef = 0,
        partials: Mapping[str, MultiPoly | Coef] | None = None,
    ):
        self.scalar = MultiPoly.coerce(scalar)
        clean: dict[str, MultiPoly] = {}
        if partials:
            for v, p in partials.items():
                p = MultiPoly.coerce(p)
                if not p.is_zero():
                    clean[v] = p
        self.partials = clean

    @classmethod
    def zero(cls) -> "DiffOp":
        return cls()

    @classmethod
    def partial(cls, name: str) -> "DiffOp":
        return cls(0, {name: ONE})

    def __add__(self, other: "DiffOp") -> "DiffOp":
        parts = dict(self.partials)
        for v, p in other.partials.items():
            parts[v] = parts.get(v, ZERO) + p
        return DiffOp(self.scalar + other.scalar, parts)

    def __neg__(self) -> "DiffOp":
        return DiffOp(-self.scalar, {v: -p for v, p in self.partials.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c: "MultiPoly | Coef") -> "DiffOp":
        c = MultiPoly.coerce(c)
        return DiffOp(self.scalar * c, {v: p * c for v, p in self.partials.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.scalar == other.scalar and self.partials == other.partials

    def __hash__(self) -> int:
        return hash((self.scalar, frozenset(self.partials.items())))

    def is_zero(self) -> bool:
        return self.scalar.is_zero() and not self.partials

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Apply the operator to a polynomial function."""
        out = self.scalar * f
        for v, p in self.partials.items():
            out = out + p * f.diff(v)
        return out

    def vector_apply(self, f: MultiPoly) -> MultiPoly:
        """Apply only the derivation part (no multiplication by the scalar)."""
        out = MultiPoly.zero()
        for v, p in self.partials.items():
            out = out + p * f.diff(v)
        return out

    def subs(self, mapping: Mapping[str, MultiPoly | Coef]) -> "DiffOp":
        """Substitute into all coefficient polynomials (not into the d/db keys)."""
        return DiffOp(
            self.scalar.subs(mapping),
            {v: p.subs(mapping) for v, p in self.partials.items()},
        )

    def rename(self, var_map: Mapping[str, str]) -> "DiffOp":
        """Rename chart variables, both in coefficients and in the derivations."""
        return DiffOp(
            self.scalar.rename(var_map),
            {var_map.get(v, v): p.rename(var_map) for v, p in self.partials.items()},
        )

    def render(self) -> str:
        head = self.scalar.render()
        tail = " | ".join(
            f"d{v}: {p.render()}" for v, p in sorted(self.partials.items())
        )
        return f"{head} | {tail}" if tail else head

    __str__ = render

    def __repr__(self) -> str:
        return f"DiffOp({self.render()})"

    def to_json(self) -> dict:
        return {
            "scalar": self.scalar.render(),
            "partials": [
                {"variable": v, "poly": p.render()}
                for v, p in sorted(self.partials.items())
            ],
        }


def _second_order_part(a: DiffOp, b: DiffOp) -> dict[tuple[str, str], MultiPoly]:
    """Symmetrized coefficients of d^2/(du dv) in the composition a∘b."""
    out: dict[tuple[str, str], MultiPoly] = {}
    for u, pu in a.partials.items():
        for v, pv in b.partials.items():
            key = (u, v) if u <= v else (v, u)
            out[key] = out.get(key, ZERO) + pu * pv
    return {k: p for k, p in out.items() if not p.is_zero()}


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    """Operator commutator [a, b] = a∘b - b∘a, closed on first-order operators.

    The second-order pieces of the two compositions are built explicitly and
    required to cancel term by term.
    """
    second_ab = _second_order_part(a, b)
    second_ba = _second_order_part(b, a)
    if second_ab != second_ba:
        raise AssertionError("second-order terms failed to cancel in commutator")
    scalar = a.vector_apply(b.scalar) - b.vector_apply(a.scalar)
    parts: dict[str, MultiPoly] = {}
    for v in set(a.partials) | set(b.partials):
        q = a.vector_apply(b.partials.get(v, ZERO)) - b.vector_apply(a.partials.get(v, ZERO))
        if not q.is_zero():
            parts[v] = q
    return DiffOp(scalar, parts)


def op_equal(a: DiffOp, b: DiffOp) -> bool:
    """Exact structural equality of canonicalized operators."""
    return a == b
