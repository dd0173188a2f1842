"""Synthesis of the generator action as first-order differential operators.

Given a root system with structure table, an extreme weight and the rational
coefficient family from :mod:`csflow.coeffs`, every Cartan-Weyl generator X is
realized as a first-order operator on the coherent-state chart:

* raising generators (positive roots) come out as pure derivation operators,
  the k-th correction being a chained-structure-constant polynomial of
  homogeneous degree k weighted by c_k and truncating at the series bound nu;
* Cartan generators are ``weight(H) + sum_b b(H) z_b d_b``;
* lowering generators acquire the weight-linear scalar part
  ``(weight, g) z_{-g}`` plus polynomial derivations, computed from the exact
  adjoint-series algebra (negative non-simple roots may instead be built by
  commutator recursion over a decomposition, and the two routes agree).

Two charts are supported: the canonical chart (coordinates of the single
exponential) and, for the A series, the matrix chart in which the coordinates
are literally the entries of the unipotent group element.  The two are linked
by an exact triangular polynomial change of variables.

Conventions.  A table synthesized here maps X to its action on the
coherent-state family built over a lowest-weight vector ("direct" tag); this
satisfies the reversed homomorphism [DX, DY] = D[Y, X].  Re-labelling
generators through transpose plus weight reversal produces the table acting
on symbols over a highest-weight vector ("symbol" tag), which satisfies the
plain homomorphism [DX, DY] = D[X, Y]; :func:`su_flag_representation` builds
that form directly and reproduces the su(2) and su(3) golden tables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction as Q
from math import factorial
from typing import Callable, Mapping, Sequence

from .coeffs import CoeffTable
from .rootsys import (
    BasisKey,
    Root,
    RootSystem,
    StructureTable,
    bracket_basis,
    build_a_series,
    n_structure,
)
from .symalg import ONE, ZERO, DiffOp, MultiPoly, commutator, op_equal


class SynthError(ValueError):
    pass


class NotPositiveRoot(SynthError):
    pass


class NotSimpleNegativeRoot(SynthError):
    pass


class WeightPairingNonzero(SynthError):
    pass


class NoDecomposition(SynthError):
    pass


Weight = Sequence


def _coerce_weight(system: RootSystem, weight: Weight | None) -> tuple[MultiPoly, ...]:
    if weight is None:
        weight = [MultiPoly.var(f"w{k + 1}") for k in range(system.cartan_dim)]
    if len(weight) != system.cartan_dim:
        raise SynthError("weight must have one component per Cartan generator")
    return tuple(MultiPoly.coerce(w) for w in weight)


# ---------------------------------------------------------------------------
# adjoint-series machinery on Lie-algebra elements with polynomial coefficients
# ---------------------------------------------------------------------------

Element = dict[BasisKey, MultiPoly]


def _elem_add(acc: Element, extra: Element, scale=None) -> None:
    for key, poly in extra.items():
        p = poly if scale is None else poly * scale
        s = acc.get(key, ZERO) + p
        if s.is_zero():
            acc.pop(key, None)
        else:
            acc[key] = s


def _ad_z(system: RootSystem, table: StructureTable, zvars: Sequence[str], elem: Element) -> Element:
    """[Z, elem] with Z = sum over positive roots of z_a E_a."""
    out: Element = {}
    for key, poly in elem.items():
        for a in range(system.n_positive):
            za = MultiPoly.var(zvars[a])
            for key2, c in bracket_basis(system, table, ("E", a), key).items():
                _elem_add(out, {key2: poly * za}, scale=c)
    return out


def _exp_neg_ad(system, table, zvars, elem: Element) -> Element:
    acc: Element = dict(elem)
    term: Element = dict(elem)
    m = 1
    while term:
        term = _ad_z(system, table, zvars, term)
        term = {k: p * Q(-1, m) for k, p in term.items()}
        _elem_add(acc, term)
        m += 1
        if m > 4 * len(system.roots) + 8:
            raise AssertionError("adjoint series failed to terminate")
    return acc


def _theta_inverse_rows(
    system: RootSystem, table: StructureTable, zvars: Sequence[str], ctab: CoeffTable
) -> list[dict[int, MultiPoly]]:
    """Row b: coefficients expressing exp(Z) E_b e0 over the d/dz_d basis.

    This is the operator Sum_k c_k ad_Z^k applied to E_b, read component-wise
    on the positive roots.
    """
    rows: list[dict[int, MultiPoly]] = []
    for b in range(system.n_positive):
        out: dict[int, MultiPoly] = {b: ONE}
        term: Element = {("E", b): ONE}
        k = 1
        while term:
            term = _ad_z(system, table, zvars, term)
            if not term:
                break
            if k >= len(ctab.c):
                raise SynthError("coefficient table depth is below the series bound nu")
            ck = ctab.c[k]
            if ck != 0:
                for key, poly in term.items():
                    if key[0] != "E":
                        raise AssertionError("raising ladder left the positive span")
                    d = key[1]
                    s = out.get(d, ZERO) + poly * ck
                    if s.is_zero():
                        out.pop(d, None)
                    else:
                        out[d] = s
            k += 1
        rows.append(out)
    return rows


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartData:
    """Exact change of variables between canonical and matrix-entry charts."""

    tmp_names: tuple[str, ...]
    subs_map: Mapping[str, MultiPoly]           # tmp -> polynomial in chart vars
    jacobian: Mapping[tuple[int, int], MultiPoly]  # (target d, source b) in chart vars
    z_of_canonical: Mapping[str, MultiPoly]     # chart var -> polynomial in tmp


def _matrix_chart(system: RootSystem, zvars: Sequence[str]) -> ChartData:
    if system.entry[0] is None:
        raise SynthError("matrix chart requires a matrix realization (A series)")
    npos = system.n_positive
    size = system.cartan_dim
    tmp = tuple(f"_t{i}" for i in range(npos))

    # U = exp(sum tmp_a M_a) with nilpotent MultiPoly entries
    mat = [[ZERO for _ in range(size)] for _ in range(size)]
    for a in range(npos):
        i, j = system.entry[a]
        mat[i - 1][j - 1] = mat[i - 1][j - 1] + MultiPoly.var(tmp[a])
    term = [[ONE if i == j else ZERO for j in range(size)] for i in range(size)]
    u = [row[:] for row in term]
    m = 1
    while True:
        nxt = [
            [
                sum((term[i][k] * mat[k][j] for k in range(size)), ZERO) * Q(1, m)
                for j in range(size)
            ]
            for i in range(size)
        ]
        if all(p.is_zero() for row in nxt for p in row):
            break
        for i in range(size):
            for j in range(size):
                u[i][j] = u[i][j] + nxt[i][j]
        term = nxt
        m += 1

    z_exprs = {}
    for a in range(npos):
        i, j = system.entry[a]
        z_exprs[a] = u[i - 1][j - 1]

    # invert the triangular map, ascending in root height
    order = sorted(range(npos), key=lambda a: system.roots[a].sort_key())
    subs: dict[str, MultiPoly] = {}
    for a in order:
        rest = z_exprs[a] - MultiPoly.var(tmp[a])
        subs[tmp[a]] = MultiPoly.var(zvars[a]) - rest.subs(subs)

    jac: dict[tuple[int, int], MultiPoly] = {}
    for d in range(npos):
        for b in range(npos):
            p = z_exprs[d].diff(tmp[b])
            if not p.is_zero():
                jac[(d, b)] = p.subs(subs)

    return ChartData(tmp_names=tmp, subs_map=subs, jacobian=jac, z_of_canonical=
                     {zvars[a]: z_exprs[a] for a in range(npos)})


def _transform_to_matrix_chart(
    op: DiffOp, zvars: Sequence[str], chart: ChartData
) -> DiffOp:
    rename = {zvars[a]: chart.tmp_names[a] for a in range(len(zvars))}
    scalar = op.scalar.rename(rename).subs(chart.subs_map)
    parts: dict[str, MultiPoly] = {}
    for v, qb in op.partials.items():
        b = zvars.index(v)
        qb_z = qb.rename(rename).subs(chart.subs_map)
        for (d, b2), jpoly in chart.jacobian.items():
            if b2 != b:
                continue
            tgt = zvars[d]
            s = parts.get(tgt, ZERO) + qb_z * jpoly
            if s.is_zero():
                parts.pop(tgt, None)
            else:
                parts[tgt] = s
    return DiffOp(scalar, parts)


# ---------------------------------------------------------------------------
# synthesis engine
# ---------------------------------------------------------------------------


class Synthesizer:
    """Caches the per-system data (coefficients, theta rows, chart maps)."""

    def __init__(
        self,
        system: RootSystem,
        table: StructureTable,
        weight: Weight | None = None,
        chart: str = "matrix",
        coeff_table: CoeffTable | None = None,
    ):
        if chart not in ("matrix", "canonical"):
            raise SynthError(f"unknown chart {chart!r}")
        if chart == "matrix" and system.entry[0] is None:
            chart = "canonical"
        self.system = system
        self.table = table
        self.chart = chart
        self.weight = _coerce_weight(system, weight)
        self.zvars = system.zvars()
        depth = max(system.nu + 2, 2)
        self.coeffs = coeff_table or CoeffTable.build(depth)
        if len(self.coeffs.c) - 1 < system.nu:
            raise SynthError("coefficient table depth is below the series bound nu")
        self._theta = _theta_inverse_rows(system, table, self.zvars, self.coeffs)
        self._chart_data = _matrix_chart(system, self.zvars) if chart == "matrix" else None

    # -- generic element -> operator ---------------------------------------

    def op_for_element(self, elem: Element) -> DiffOp:
        pushed = _exp_neg_ad(self.system, self.table, self.zvars, elem)
        scalar = ZERO
        parts: dict[str, MultiPoly] = {}
        npos = self.system.n_positive
        for key, poly in pushed.items():
            if key[0] == "H":
                scalar = scalar + poly * self.weight[key[1]]
                continue
            ridx = key[1]
            if ridx >= npos:
                continue  # annihilates the extreme vector
            for d, conv in self._theta[ridx].items():
                v = self.zvars[d]
                s = parts.get(v, ZERO) + poly * conv
                if s.is_zero():
                    parts.pop(v, None)
                else:
                    parts[v] = s
        op = DiffOp(scalar, parts)
        if self._chart_data is not None:
            op = _transform_to_matrix_chart(op, self.zvars, self._chart_data)
        return op

    def op_for_basis(self, key: BasisKey) -> DiffOp:
        if key[0] == "H":
            return self.cartan_for_vector(
                [Q(1) if k == key[1] else Q(0) for k in range(self.system.cartan_dim)]
            )
        return self.op_for_element({key: ONE})

    # -- the four formula surfaces ------------------------------------------

    def raising_chain_polynomials(
        self, alpha: Root, kmax: int | None = None
    ) -> dict[int, dict[int, MultiPoly]]:
        """Chain polynomials p_k of the raising expansion, per level and target.

        Level k maps the index of the positive root alpha + (chain sum) to the
        sum over all k-step chains of products of structure constants times
        the chain monomial; each entry is homogeneous of degree k in the
        canonical coordinates, and levels beyond the series bound are empty.
        """
        idx = self.system.index(alpha)
        if idx is None or not alpha.is_positive:
            raise NotPositiveRoot(f"{alpha} is not a positive root")
        if kmax is None:
            kmax = self.system.nu
        levels: dict[int, dict[int, MultiPoly]] = {0: {idx: ONE}}
        level: dict[int, MultiPoly] = {idx: ONE}
        for k in range(1, kmax + 1):
            nxt: dict[int, MultiPoly] = {}
            for cur, poly in level.items():
                cur_root = self.system.roots[cur]
                for a in range(self.system.n_positive):
                    n = n_structure(self.system, self.table, self.system.roots[a], cur_root)
                    if n == 0:
                        continue
                    tgt = self.system.index(Root(self.system.roots[a] + cur_root))
                    if tgt is None or tgt >= self.system.n_positive:
                        continue
                    term = poly * MultiPoly.var(self.zvars[a]) * n
                    s = nxt.get(tgt, ZERO) + term
                    if s.is_zero():
                        nxt.pop(tgt, None)
                    else:
                        nxt[tgt] = s
            if not nxt:
                break
            levels[k] = dict(nxt)
            level = nxt
        return levels

    def raising(self, alpha: Root, kmax: int | None = None) -> DiffOp:
        """Pure-derivation operator for a positive root, via structure chains.

        The k-th level carries the chained structure constants over all paths
        of k positive roots climbing from alpha, weighted by (-1)^k c_k; the
        ladder dies at the series bound nu, so larger kmax changes nothing.
        """
        levels = self.raising_chain_polynomials(alpha, kmax)
        depth = max(levels)
        cvals = self.coeffs.c if depth < len(self.coeffs.c) else CoeffTable.build(depth).c
        parts: dict[str, MultiPoly] = {}
        for k, table_k in levels.items():
            ck = cvals[k] * (-1) ** k
            if ck == 0:
                continue
            for tgt, poly in table_k.items():
                v = self.zvars[tgt]
                s = parts.get(v, ZERO) + poly * ck
                if s.is_zero():
                    parts.pop(v, None)
                else:
                    parts[v] = s
        op = DiffOp(ZERO, parts)
        if self._chart_data is not None:
            op = _transform_to_matrix_chart(op, self.zvars, self._chart_data)
        return op

    def cartan_for_vector(self, hvec: Sequence) -> DiffOp:
        """weight(H) + sum_b b(H) z_b d_b for H given over the Cartan basis.

        The formula has the same shape in both charts because the change of
        variables is homogeneous under the torus action.
        """
        scalar = ZERO
        for k, comp in enumerate(hvec):
            scalar = scalar + MultiPoly.coerce(comp) * self.weight[k]
        parts: dict[str, MultiPoly] = {}
        for b in range(self.system.n_positive):
            coef = sum(
                (self.system.pairing[b][k] * MultiPoly.coerce(hvec[k]) for k in range(len(hvec))),
                ZERO,
            )
            if not coef.is_zero():
                parts[self.zvars[b]] = coef * MultiPoly.var(self.zvars[b])
        return DiffOp(scalar, parts)

    def cartan(self, k: int) -> DiffOp:
        return self.op_for_basis(("H", k))

    def lowering_simple(self, gamma: Root) -> DiffOp:
        """Operator for a negative simple root; scalar part is (weight, gamma) z_{-gamma}."""
        minus = -gamma
        if gamma.is_positive or not (self.system.is_root(minus) and minus.height == 1):
            raise NotSimpleNegativeRoot(f"{gamma} is not the negative of a simple root")
        idx = self.system.index(gamma)
        op = self.op_for_element({("E", idx): ONE})
        expected_scalar = MultiPoly.coerce(
            self.system.weight_pairing(gamma, self.weight)
        ) * MultiPoly.var(self.zvars[self.system.index(minus)])
        if op.scalar != expected_scalar:
            raise AssertionError("lowering scalar part lost its weight-linear form")
        return op

    def lowering_general(self, gamma: Root, _memo: dict | None = None) -> DiffOp:
        """Negative non-simple roots by commutator recursion over a decomposition.

        Every decomposition gamma = g1 + g2 with nonzero n_{g1,g2} must give
        the same operator; all of them are formed and compared.
        """
        if gamma.is_positive:
            raise NotPositiveRoot(f"{gamma} is positive; use raising()")
        memo = _memo if _memo is not None else {}
        minus = -gamma
        if self.system.is_root(minus) and minus.height == 1:
            return self.lowering_simple(gamma)
        if gamma in memo:
            return memo[gamma]
        candidates: list[DiffOp] = []
        negs = [self.system.roots[i] for i in range(self.system.n_positive, len(self.system.roots))]
        for g1 in sorted(negs, key=lambda r: (-r.height, r.coeffs)):  # lowest-height first
            rest = tuple(a - b for a, b in zip(gamma.coeffs, g1.coeffs))
            if not any(rest):
                continue
            g2 = Root(rest)
            if g2.is_positive or not self.system.is_root(g2):
                continue
            n = n_structure(self.system, self.table, g1, g2)
            if n == 0:
                continue
            op1 = self.lowering_general(g1, memo)
            op2 = self.lowering_general(g2, memo)
            # direct-convention tables reverse brackets: D[X,Y] = [DY, DX]
            candidates.append(commutator(op2, op1).scale(Q(1) / n))
        if not candidates:
            raise NoDecomposition(f"{gamma} admits no decomposition with nonzero n")
        for other in candidates[1:]:
            if not op_equal(candidates[0], other):
                raise AssertionError(f"decompositions of {gamma} disagree")
        memo[gamma] = candidates[0]
        return candidates[0]

    def orthogonal(self, alpha: Root) -> DiffOp:
        """Operator for a root orthogonal to the weight, (alpha, weight) = 0."""
        pairing = MultiPoly.coerce(self.system.weight_pairing(alpha, self.weight))
        if not pairing.is_zero():
            raise WeightPairingNonzero(f"({alpha}, weight) = {pairing.render()} != 0")
        idx = self.system.index(alpha)
        return self.op_for_element({("E", idx): ONE})

    def full_table(self) -> dict[BasisKey, DiffOp]:
        ops: dict[BasisKey, DiffOp] = {}
        for i in range(len(self.system.roots)):
            ops[("E", i)] = self.op_for_basis(("E", i))
        for k in range(self.system.cartan_dim):
            ops[("H", k)] = self.op_for_basis(("H", k))
        return ops


# module-level convenience wrappers ------------------------------------------


def synth_raising(system, table, alpha, weight=None, chart="matrix", kmax=None) -> DiffOp:
    return Synthesizer(system, table, weight, chart).raising(alpha, kmax=kmax)


def synth_cartan(system, table, hvec, weight=None, chart="matrix") -> DiffOp:
    return Synthesizer(system, table, weight, chart).cartan_for_vector(hvec)


def synth_lowering_simple(system, table, gamma, weight=None, chart="matrix") -> DiffOp:
    return Synthesizer(system, table, weight, chart).lowering_simple(gamma)


def synth_lowering_general(system, table, gamma, weight=None, chart="matrix") -> DiffOp:
    return Synthesizer(system, table, weight, chart).lowering_general(gamma)


def synth_orthogonal(system, table, alpha, weight=None, chart="matrix") -> DiffOp:
    return Synthesizer(system, table, weight, chart).orthogonal(alpha)


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass
class Representation:
    """A finished operator table with brackets, adjoints and a convention tag.

    convention "symbol": [DX, DY] = D[X, Y] (highest-weight symbol action);
    convention "direct": [DX, DY] = D[Y, X] (lowest-weight vector action).
    """

    name: str
    ops: dict[str, DiffOp]
    zvars: list[str]
    convention: str
    adjoint: dict[str, str]
    bracket_fn: Callable[[str, str], dict[str, Q]]
    weight_symbols: tuple[str, ...] = ()

    def generators(self) -> list[str]:
        return list(self.ops)

    def op(self, label: str) -> DiffOp:
        return self.ops[label]

    def q_poly(self, label: str, var: str) -> MultiPoly:
        return self.ops[label].partials.get(var, ZERO)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "convention": self.convention,
            "variables": list(self.zvars),
            "operators": [
                {"generator": g, **self.ops[g].to_json()} for g in sorted(self.ops)
            ],
        }

    def render(self) -> str:
        lines = [f"# {self.name} ({self.convention} convention)"]
        for g in sorted(self.ops):
            lines.append(f"{g}: {self.ops[g].render()}")
        return "\n".join(lines)


def gl_bracket(x: str, y: str) -> dict[str, Q]:
    """[C_ij, C_kl] = d_jk C_il - d_il C_kj on elementary-matrix labels."""
    i, j = _parse_c(x)
    k, l = _parse_c(y)
    out: dict[str, Q] = {}
    if j == k:
        lbl = _c_label(i, l)
        out[lbl] = out.get(lbl, Q(0)) + 1
    if i == l:
        lbl = _c_label(k, j)
        out[lbl] = out.get(lbl, Q(0)) - 1
    return {k_: v for k_, v in out.items() if v != 0}


def _parse_c(label: str) -> tuple[int, int]:
    m = re.fullmatch(r"C(\d)_?(\d+)", label) or re.fullmatch(r"C(\d+)_(\d+)", label)
    if not m:
        raise SynthError(f"not an elementary-matrix label: {label}")
    return int(m.group(1)), int(m.group(2))


def _c_label(i: int, j: int) -> str:
    return f"C{i}{j}" if max(i, j) <= 9 else f"C{i}_{j}"


_SU2_BRACKETS: dict[tuple[str, str], dict[str, Q]] = {
    ("J0", "J+"): {"J+": Q(1)},
    ("J+", "J0"): {"J+": Q(-1)},
    ("J0", "J-"): {"J-": Q(-1)},
    ("J-", "J0"): {"J-": Q(1)},
    ("J-", "J+"): {"J0": Q(-2)},
    ("J+", "J-"): {"J0": Q(2)},
}


def su2_bracket(x: str, y: str) -> dict[str, Q]:
    return dict(_SU2_BRACKETS.get((x, y), {}))


def a_series_direct_representation(
    l: int, weight: Weight | None = None, chart: str = "matrix"
) -> Representation:
    """Lowest-weight table for A_l over the elementary-matrix labels C_ij."""
    system, table = build_a_series(l)
    syn = Synthesizer(system, table, weight, chart)
    raw = syn.full_table()
    ops: dict[str, DiffOp] = {}
    adjoint: dict[str, str] = {}
    for i in range(len(system.roots)):
        lbl = system.e_label(i)
        ops[lbl] = raw[("E", i)]
        a, b = system.entry[i]
        adjoint[lbl] = _c_label(b, a)
    for k in range(system.cartan_dim):
        lbl = system.h_label(k)
        ops[lbl] = raw[("H", k)]
        adjoint[lbl] = lbl
    wsyms = tuple(sorted({v for w in syn.weight for v in w.variables()}))
    return Representation(
        name=f"A{l} lowest-weight table",
        ops=ops,
        zvars=list(syn.zvars),
        convention="direct",
        adjoint=adjoint,
        bracket_fn=gl_bracket,
        weight_symbols=wsyms,
    )


def su_flag_representation(
    n: int, weights: Weight | None = None, chart: str = "matrix"
) -> Representation:
    """Symbol-convention table for the su(n) flag manifold (plain homomorphism).

    Obtained from the lowest-weight synthesis through the documented mapping:
    transpose of the generator labels combined with reversal of the weight
    components and of the chart variable names.  For n = 3 this reproduces
    the su(3) golden table identically, symbolically in w1, w2, w3.
    """
    if weights is None:
        weights = [MultiPoly.var(f"w{k + 1}") for k in range(n)]
    weights = [MultiPoly.coerce(w) for w in weights]
    lam = tuple(reversed(weights))
    system, table = build_a_series(n - 1)
    syn = Synthesizer(system, table, lam, chart)
    raw = syn.full_table()

    def flip_var(name: str) -> str:
        m = re.fullmatch(r"z(\d)(\d)", name)
        a, b = int(m.group(1)), int(m.group(2))
        a2, b2 = sorted((n + 1 - a, n + 1 - b))
        return f"z{a2}{b2}"

    varmap = {v: flip_var(v) for v in syn.zvars}
    ops: dict[str, DiffOp] = {}
    adjoint: dict[str, str] = {}
    for i in range(len(system.roots)):
        a, b = system.entry[i]
        target = _c_label(n + 1 - b, n + 1 - a)
        ops[target] = raw[("E", i)].rename(varmap)
        ti, tj = n + 1 - b, n + 1 - a
        adjoint[target] = _c_label(tj, ti)
    for k in range(system.cartan_dim):
        target = _c_label(n - k, n - k)
        ops[target] = raw[("H", k)].rename(varmap)
        adjoint[target] = target
    wsyms = tuple(sorted({v for w in weights for v in w.variables()}))
    return Representation(
        name=f"su({n}) flag table",
        ops=ops,
        zvars=sorted(set(varmap.values())),
        convention="symbol",
        adjoint=adjoint,
        bracket_fn=gl_bracket,
        weight_symbols=wsyms,
    )


def su2_representation(j: MultiPoly | Q | str = "j", convention: str = "direct") -> Representation:
    """su(2) table over the physics labels J0, J+, J- and the single variable z.

    direct: lowest weight -j (J0 -> -j + z d; matches the golden table as is).
    symbol: highest weight +j (J0 -> j - z d; plain homomorphism).
    """
    jpoly = MultiPoly.var(j) if isinstance(j, str) else MultiPoly.coerce(j)
    if convention == "direct":
        base = a_series_direct_representation(1, weight=[-jpoly, jpoly])
        labels = {"J+": "C12", "J-": "C21"}
    elif convention == "symbol":
        base = su_flag_representation(2, weights=[jpoly, -jpoly])
        labels = {"J+": "C12", "J-": "C21"}
    else:
        raise SynthError(f"unknown convention {convention!r}")
    rename = {"z12": "z"}
    half = MultiPoly.const(Q(1, 2))
    j0 = (base.ops["C11"] - base.ops["C22"]).scale(half).rename(rename)
    ops = {
        "J0": j0,
        "J+": base.ops[labels["J+"]].rename(rename),
        "J-": base.ops[labels["J-"]].rename(rename),
    }
    return Representation(
        name=f"su(2) table ({convention})",
        ops=ops,
        zvars=["z"],
        convention=convention,
        adjoint={"J0": "J0", "J+": "J-", "J-": "J+"},
        bracket_fn=su2_bracket,
        weight_symbols=tuple(sorted(jpoly.variables())),
    )


# ---------------------------------------------------------------------------
# golden tables (frozen oracles) and the homomorphism checker
# ---------------------------------------------------------------------------


def golden_tables() -> dict[str, Representation]:
    """Hardcoded su(2) and su(3) operator tables, weight-parametric."""
    j = MultiPoly.var("j")
    z = MultiPoly.var("z")
    dz = "z"
    su2 = Representation(
        name="su(2) golden table",
        ops={
            "J0": DiffOp(-j, {dz: z}),
            "J+": DiffOp(0, {dz: ONE}),
            "J-": DiffOp(2 * j * z, {dz: -(z * z)}),
        },
        zvars=["z"],
        convention="direct",
        adjoint={"J0": "J0", "J+": "J-", "J-": "J+"},
        bracket_fn=su2_bracket,
        weight_symbols=("j",),
    )

    w1, w2, w3 = (MultiPoly.var(f"w{i}") for i in (1, 2, 3))
    z12, z13, z23 = (MultiPoly.var(v) for v in ("z12", "z13", "z23"))
    su3 = Representation(
        name="su(3) golden table",
        ops={
            "C11": DiffOp(w1, {"z12": -z12, "z13": -z13}),
            "C12": DiffOp(0, {"z12": ONE}),
            "C13": DiffOp(0, {"z13": ONE}),
            "C21": DiffOp(
                (w1 - w2) * z12,
                {"z12": -(z12 ** 2), "z13": -z12 * z13, "z23": z12 * z23 - z13},
            ),
            "C22": DiffOp(w2, {"z12": z12, "z23": -z23}),
            "C23": DiffOp(0, {"z13": z12, "z23": ONE}),
            "C31": DiffOp(
                (w1 - w3) * z13 - (w2 - w3) * z12 * z23,
                {
                    "z12": -z12 * z13,
                    "z13": -(z13 ** 2),
                    "z23": (z12 * z23 - z13) * z23,
                },
            ),
            "C32": DiffOp((w2 - w3) * z23, {"z12": z13, "z23": -(z23 ** 2)}),
            "C33": DiffOp(w3, {"z13": z13, "z23": z23}),
        },
        zvars=["z12", "z13", "z23"],
        convention="symbol",
        adjoint={_c_label(i, j_): _c_label(j_, i) for i in (1, 2, 3) for j_ in (1, 2, 3)},
        bracket_fn=gl_bracket,
        weight_symbols=("w1", "w2", "w3"),
    )
    return {"su2": su2, "su3": su3}


@dataclass
class HomomorphismFailure:
    x: str
    y: str
    difference: DiffOp


def verify_homomorphism(rep: Representation) -> list[HomomorphismFailure]:
    """Check [DX, DY] = D[X, Y] over all ordered generator pairs.

    For a direct-convention table the expected side uses the reversed bracket
    D[Y, X].  Failures are returned as data, never raised.
    """
    failures: list[HomomorphismFailure] = []
    gens = rep.generators()
    for x in gens:
        for y in gens:
            actual = commutator(rep.ops[x], rep.ops[y])
            pair = (y, x) if rep.convention == "direct" else (x, y)
            expected = DiffOp.zero()
            for lbl, coef in rep.bracket_fn(*pair).items():
                expected = expected + rep.ops[lbl].scale(coef)
            if not op_equal(actual, expected):
                failures.append(HomomorphismFailure(x, y, actual - expected))
    return failures
