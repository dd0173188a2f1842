"""Root systems, Cartan pairings and structure constants for the Cartan-Weyl basis.

The A series is built from scratch: the generator attached to the root
e_i - e_j is the elementary matrix C_ij, the Cartan basis is C_11 .. C_nn
(the trace constraint is noted, not quotiented), and every structure constant
n_{ab} in [E_a, E_b] = n_{ab} E_{a+b} is read off an actual matrix
commutator.  Other series are accepted through :func:`load_custom` with a
user-supplied antisymmetric table, validated by brute force.

Roots are stored as integer coefficient vectors over the simple roots; a root
is positive iff all coefficients are >= 0 and not all vanish.  All orderings
are deterministic: positive roots sorted by (height, coefficients), negatives
mirrored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Iterable, Mapping, Sequence, Union

BasisKey = tuple[str, int]  # ("E", root index) or ("H", cartan index)


class RootSystemError(ValueError):
    pass


class AntisymmetryViolation(RootSystemError):
    def __init__(self, a: "Root", b: "Root"):
        super().__init__(f"n({a},{b}) != -n({b},{a})")
        self.pair = (a, b)


class ClosureViolation(RootSystemError):
    def __init__(self, a: "Root", b: "Root", why: str):
        super().__init__(f"closure violated on ({a},{b}): {why}")
        self.pair = (a, b)


class JacobiViolation(RootSystemError):
    def __init__(self, triple: tuple[BasisKey, BasisKey, BasisKey]):
        super().__init__(f"Jacobi identity fails on basis triple {triple}")
        self.triple = triple


#: Truncation bound of the raising-operator expansion, per simple series.
NU_TABLE: dict[str, dict[int, int]] = {
    "A": {rank: rank - 1 for rank in range(1, 25)},
    "B": {rank: 2 * rank - 2 for rank in range(2, 25)},
    "C": {rank: 2 * rank - 2 for rank in range(2, 25)},
    "D": {rank: 2 * rank - 4 for rank in range(3, 25)},
    "E": {6: 10, 7: 16, 8: 28},
    "F": {4: 10},
    "G": {2: 4},
}


def nu_bound(series: str, rank: int) -> int:
    try:
        return NU_TABLE[series][rank]
    except KeyError:
        raise RootSystemError(f"no truncation bound stored for {series}{rank}") from None


@dataclass(frozen=True, order=True)
class Root:
    """A root as an integer vector over the simple roots."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not any(self.coeffs):
            raise RootSystemError("the zero vector is not a root")

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    def sort_key(self) -> tuple:
        # deterministic order: by height, then by coefficient vector with the
        # leftmost simple root first (C12 before C23 in the A series)
        return (self.height, tuple(-c for c in self.coeffs))

    def __add__(self, other: "Root") -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coeffs))

    def __str__(self) -> str:
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"


def _sum_root(a: Root, b: Root) -> Root | None:
    s = a + b
    if not any(s):
        return None
    return Root(s)


@dataclass(frozen=True)
class RootSystem:
    """Roots, positivity, Cartan pairings and naming for one algebra."""

    series: str
    rank: int
    roots: tuple[Root, ...]                      # positives first, then mirrored negatives
    cartan_dim: int
    pairing: tuple[tuple[Q, ...], ...]           # pairing[i][k] = alpha_i(H_k)
    nu: int
    hroot: tuple[tuple[Q, ...], ...] = field(default=None)  # H_alpha over the H basis
    entry: tuple[tuple[int, int] | None, ...] = field(default=None)  # A series: (i, j) of C_ij

    def __post_init__(self):
        if self.hroot is None:
            # gl-style Cartan basis: H_alpha expands with the pairing values
            object.__setattr__(self, "hroot", self.pairing)
        if self.entry is None:
            object.__setattr__(self, "entry", tuple(None for _ in self.roots))

    # -- lookups -----------------------------------------------------------

    @property
    def n_positive(self) -> int:
        return len(self.roots) // 2

    @property
    def positive(self) -> tuple[Root, ...]:
        return self.roots[: self.n_positive]

    def index(self, root: Root) -> int | None:
        try:
            return self._index_map()[root]
        except KeyError:
            return None

    def _index_map(self) -> dict[Root, int]:
        cached = getattr(self, "_imap", None)
        if cached is None:
            cached = {r: i for i, r in enumerate(self.roots)}
            object.__setattr__(self, "_imap", cached)
        return cached

    def is_root(self, root: Root) -> bool:
        return root in self._index_map()

    def simple_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.positive) if r.height == 1]

    def weight_pairing(self, root: Root, weight: Sequence) -> object:
        """(weight, root) = weight(H_root) for the expansion of H_root."""
        i = self.index(root)
        if i is None:
            raise RootSystemError(f"{root} is not a root of {self.series}{self.rank}")
        total = 0
        for k in range(self.cartan_dim):
            total = total + self.hroot[i][k] * weight[k]
        return total

    # -- naming ------------------------------------------------------------

    def zvar(self, pos_index: int) -> str:
        ent = self.entry[pos_index]
        if ent is not None:
            i, j = min(ent), max(ent)
            return f"z{i}{j}" if j <= 9 else f"z{i}_{j}"
        return f"z{pos_index + 1}"

    def zvars(self) -> list[str]:
        return [self.zvar(i) for i in range(self.n_positive)]

    def e_label(self, index: int) -> str:
        ent = self.entry[index]
        if ent is not None:
            i, j = ent
            return f"C{i}{j}" if max(i, j) <= 9 else f"C{i}_{j}"
        root = self.roots[index]
        return f"E{root}"

    def h_label(self, k: int) -> str:
        if self.series == "A" and self.entry[0] is not None:
            i = k + 1
            return f"C{i}{i}" if i <= 9 else f"C{i}_{i}"
        return f"H{k + 1}"

    def generator_labels(self) -> list[str]:
        labels = [self.e_label(i) for i in range(len(self.roots))]
        labels += [self.h_label(k) for k in range(self.cartan_dim)]
        return labels


@dataclass(frozen=True)
class StructureTable:
    """n_{ab} for the pairs of roots with a + b again a (nonzero) root."""

    entries: Mapping[tuple[int, int], Q]

    def n_by_index(self, ia: int, ib: int) -> Q:
        return self.entries.get((ia, ib), Q(0))

    def check_antisymmetry(self, system: RootSystem) -> None:
        for (ia, ib), v in self.entries.items():
            if self.entries.get((ib, ia), Q(0)) != -v:
                raise AntisymmetryViolation(system.roots[ia], system.roots[ib])


def n_structure(system: RootSystem, table: StructureTable, a: Root, b: Root) -> Q:
    """n_{ab}, or 0 when a+b is not a nonzero root (bracket vanishes there)."""
    ia, ib = system.index(a), system.index(b)
    if ia is None or ib is None:
        return Q(0)
    s = _sum_root(a, b)
    if s is None or not system.is_root(s):
        return Q(0)
    return table.n_by_index(ia, ib)


def bracket_basis(
    system: RootSystem, table: StructureTable, x: BasisKey, y: BasisKey
) -> dict[BasisKey, Q]:
    """Commutator of two Cartan-Weyl basis elements, as a basis expansion."""
    kx, ky = x[0], y[0]
    if kx == "H" and ky == "H":
        return {}
    if kx == "H" and ky == "E":
        coef = system.pairing[y[1]][x[1]]
        return {y: coef} if coef else {}
    if kx == "E" and ky == "H":
        coef = -system.pairing[x[1]][y[1]]
        return {x: coef} if coef else {}
    ra, rb = system.roots[x[1]], system.roots[y[1]]
    s = _sum_root(ra, rb)
    if s is None:
        # [E_a, E_-a] = H_a, expanded over the Cartan basis
        return {
            ("H", k): system.hroot[x[1]][k]
            for k in range(system.cartan_dim)
            if system.hroot[x[1]][k]
        }
    idx = system.index(s)
    if idx is None:
        return {}
    n = table.n_by_index(x[1], y[1])
    return {("E", idx): n} if n else {}


def bracket_expand(
    system: RootSystem,
    table: StructureTable,
    dx: Mapping[BasisKey, Q],
    dy: Mapping[BasisKey, Q],
) -> dict[BasisKey, Q]:
    out: dict[BasisKey, Q] = {}
    for x, cx in dx.items():
        for y, cy in dy.items():
            for z, cz in bracket_basis(system, table, x, y).items():
                v = out.get(z, Q(0)) + cx * cy * cz
                if v == 0:
                    out.pop(z, None)
                else:
                    out[z] = v
    return out


def jacobi_check(system: RootSystem, table: StructureTable) -> None:
    """Exhaustive Jacobi identity over all basis triples (meant for rank <= 3)."""
    basis: list[BasisKey] = [("E", i) for i in range(len(system.roots))]
    basis += [("H", k) for k in range(system.cartan_dim)]
    singles = {b: {b: Q(1)} for b in basis}
    for x in basis:
        for y in basis:
            xy = bracket_expand(system, table, singles[x], singles[y])
            for z in basis:
                total = bracket_expand(system, table, xy, singles[z])
                yz = bracket_expand(system, table, singles[y], singles[z])
                for key, v in bracket_expand(system, table, yz, singles[x]).items():
                    s = total.get(key, Q(0)) + v
                    if s == 0:
                        total.pop(key, None)
                    else:
                        total[key] = s
                zx = bracket_expand(system, table, singles[z], singles[x])
                for key, v in bracket_expand(system, table, zx, singles[y]).items():
                    s = total.get(key, Q(0)) + v
                    if s == 0:
                        total.pop(key, None)
                    else:
                        total[key] = s
                if total:
                    raise JacobiViolation((x, y, z))


# -- A series from elementary matrices --------------------------------------


def _elementary(n: int, i: int, j: int) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    m[i - 1][j - 1] = 1
    return m


def _mat_comm(a, b):
    n = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    ba = [[sum(b[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return [[ab[i][j] - ba[i][j] for j in range(n)] for i in range(n)]


def build_a_series(l: int) -> tuple[RootSystem, StructureTable]:
    """A_l with E_{e_i-e_j} = C_ij, H_k = C_kk, n read off matrix commutators."""
    if l < 1:
        raise RootSystemError("rank must be >= 1")
    n = l + 1

    def coeffs_of(i: int, j: int) -> tuple[int, ...]:
        # e_i - e_j over the simple roots e_k - e_{k+1}
        c = [0] * l
        lo, hi, sign = (i, j, 1) if i < j else (j, i, -1)
        for k in range(lo, hi):
            c[k - 1] = sign
        return tuple(c)

    pos = sorted(
        ((Root(coeffs_of(i, j)), (i, j)) for i in range(1, n + 1) for j in range(i + 1, n + 1)),
        key=lambda t: t[0].sort_key(),
    )
    roots = [r for r, _ in pos] + [-r for r, _ in pos]
    entries = [e for _, e in pos] + [(e[1], e[0]) for _, e in pos]
    pair_of = {r: e for r, e in zip(roots, entries)}

    pairing = []
    for r in roots:
        i, j = pair_of[r]
        pairing.append(tuple(Q(1 if k == i else 0) - Q(1 if k == j else 0) for k in range(1, n + 1)))

    system = RootSystem(
        series="A",
        rank=l,
        roots=tuple(roots),
        cartan_dim=n,
        pairing=tuple(pairing),
        nu=nu_bound("A", l),
        entry=tuple(entries),
    )

    mats = {r: _elementary(n, *pair_of[r]) for r in roots}
    table: dict[tuple[int, int], Q] = {}
    for ia, ra in enumerate(roots):
        for ib, rb in enumerate(roots):
            s = _sum_root(ra, rb)
            if s is None or not system.is_root(s):
                continue
            comm = _mat_comm(mats[ra], mats[rb])
            ti, tj = pair_of[s]
            table[(ia, ib)] = Q(comm[ti - 1][tj - 1])
    st = StructureTable(entries=table)
    st.check_antisymmetry(system)
    return system, st


# -- chained structure constants ---------------------------------------------


def structure_chain(
    system: RootSystem,
    table: StructureTable,
    chain: Sequence[Root],
    alpha: Root,
) -> Q:
    """n_{a1...ak, alpha} = n_{a1,alpha} n_{a2,alpha+a1} ... ; empty chain gives 1.

    The product is 0 as soon as an intermediate sum leaves the root system.
    """
    value = Q(1)
    base = alpha
    for a in chain:
        factor = n_structure(system, table, a, base)
        if factor == 0:
            return Q(0)
        value *= factor
        nxt = _sum_root(a, base)
        if nxt is None:
            return Q(0)
        base = nxt
    return value


# -- custom systems ----------------------------------------------------------

_GRAM_BUILDERS = {
    # symmetrized Cartan matrices (alpha_i, alpha_j), short roots of length^2 = 2
    # except where tradition fixes otherwise; only used for custom tables.
    "A": lambda l: [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(l)] for i in range(l)],
    "B": lambda l: [
        [
            (2 if i < l - 1 else 1) if i == j else (-1 if abs(i - j) == 1 else 0)
            for j in range(l)
        ]
        for i in range(l)
    ],
    "C": lambda l: [
        [
            (2 if i < l - 1 else 4) if i == j else
            (-2 if {i, j} == {l - 2, l - 1} else (-1 if abs(i - j) == 1 else 0))
            for j in range(l)
        ]
        for i in range(l)
    ],
    # D_l: chain alpha_1..alpha_{l-1} with the fork node alpha_l attached to alpha_{l-2}
    "D": lambda l: [
        [
            2 if i == j else (
                -1
                if (abs(i - j) == 1 and {i, j} != {l - 2, l - 1}) or {i, j} == {l - 3, l - 1}
                else 0
            )
            for j in range(l)
        ]
        for i in range(l)
    ],
    "G": lambda l: [[2, -3], [-3, 6]],
}


def _gram(series: str, rank: int) -> list[list[Q]]:
    if series not in _GRAM_BUILDERS:
        raise RootSystemError(f"custom loading is not supported for series {series}")
    return [[Q(x) for x in row] for row in _GRAM_BUILDERS[series](rank)]


def load_custom(payload: Union[str, dict]) -> tuple[RootSystem, StructureTable]:
    """Build a validated system from {series, rank, roots, n} (JSON or dict).

    `roots` lists the positive roots (or all roots) as integer vectors over
    the simple roots; `n` lists triples [index_a, index_b, value] indexed into
    the supplied root list, negatives implied by antisymmetry only if present
    explicitly.  Antisymmetry is always enforced; the Jacobi identity is
    checked exhaustively up to rank 3.
    """
    if isinstance(payload, str):
        payload = json.loads(payload)
    series = payload["series"]
    rank = int(payload["rank"])
    given = [Root(tuple(int(c) for c in v)) for v in payload["roots"]]
    rootset = set(given) | {-r for r in given}
    positives = sorted((r for r in rootset if r.is_positive), key=lambda r: r.sort_key())
    roots = positives + [-r for r in positives]

    gram = _gram(series, rank)
    pairing = []
    for r in roots:
        row = []
        for k in range(rank):
            row.append(sum((Q(c) * gram[i][k] for i, c in enumerate(r.coeffs)), Q(0)))
        pairing.append(tuple(row))

    system = RootSystem(
        series=series,
        rank=rank,
        roots=tuple(roots),
        cartan_dim=rank,
        pairing=tuple(pairing),
        nu=nu_bound(series, rank),
        hroot=tuple(tuple(Q(c) for c in r.coeffs) for r in roots),
    )

    remap = {i: system.index(r) for i, r in enumerate(given)}
    entries: dict[tuple[int, int], Q] = {}
    for ia, ib, value in payload["n"]:
        a, b = remap[int(ia)], remap[int(ib)]
        ra, rb = system.roots[a], system.roots[b]
        s = _sum_root(ra, rb)
        if s is None or not system.is_root(s):
            raise ClosureViolation(ra, rb, "table entry given but the sum is not a root")
        entries[(a, b)] = Q(value)
    for (a, b), v in entries.items():
        if entries.get((b, a)) != -v:
            raise AntisymmetryViolation(system.roots[a], system.roots[b])
    # every root pair summing to a root needs an entry
    for a, ra in enumerate(system.roots):
        for b, rb in enumerate(system.roots):
            s = _sum_root(ra, rb)
            if s is not None and system.is_root(s) and (a, b) not in entries:
                raise ClosureViolation(ra, rb, "missing structure constant for a root sum")

    st = StructureTable(entries=entries)
    st.check_antisymmetry(system)
    if rank <= 3:
        jacobi_check(system, st)
    return system, st


def table_to_json(system: RootSystem, table: StructureTable) -> dict:
    """Serialize in the schema accepted by :func:`load_custom`."""
    return {
        "series": system.series,
        "rank": system.rank,
        "roots": [list(r.coeffs) for r in system.roots],
        "n": sorted([a, b, str(v)] for (a, b), v in table.entries.items()),
    }
