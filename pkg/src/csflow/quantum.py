"""Finite-dimensional matrix oracle: coherent vectors, kernels, metric, flows.

This module is deliberately independent of the symbolic synthesis: generators
are explicit matrices, coherent vectors are matrix exponentials applied to an
extreme-weight vector, kernels are inner products (or their closed forms),
the Kähler metric comes from finite differences of log K, and Schrödinger
propagation uses an eigendecomposition.  Agreement between the flows induced
here and the polynomial right-hand sides assembled from the symbolic tables
is the package's central validation.

Conventions.  Coherent vectors are holomorphic in the chart coordinates.
A representation tagged "direct" (lowest weight, e.g. the spin family) pairs
with the symbolic tables tagged "direct" coefficient-by-coefficient; a
representation tagged "symbol" (highest weight, e.g. the su(3) flag family)
pairs with the "symbol" tables after conjugating the Hamiltonian
coefficients — for hermitian coefficient matrices that is the transpose.
:func:`matched_hamiltonian` applies the right rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.linalg import expm

from .dynamics import LinearHamiltonian, NonHermitianHamiltonian
from .synth import Representation


class QuantumError(ValueError):
    pass


class InvalidSpin(QuantumError):
    pass


class OutOfChart(QuantumError):
    pass


class SingularMetric(QuantumError):
    pass


@dataclass
class MatrixRep:
    """Generator matrices plus the extreme-weight vector they act on."""

    name: str
    dim: int
    generators: dict[str, np.ndarray]
    extreme_vector: np.ndarray
    zvars: list[str]
    cs_factors: list[list[tuple[str, np.ndarray]]]
    convention: str                      # "direct" (lowest) | "symbol" (highest)
    adjoint: dict[str, str]

    def matrix_of(self, ham: LinearHamiltonian | np.ndarray) -> np.ndarray:
        if isinstance(ham, np.ndarray):
            h = np.asarray(ham, dtype=complex)
        else:
            h = np.zeros((self.dim, self.dim), dtype=complex)
            for lbl, coef in ham.eps.items():
                h = h + complex(coef) * self.generators[lbl]
        if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
            raise NonHermitianHamiltonian("assembled Hamiltonian matrix is not hermitian")
        return h

    def commutation_residual(self, bracket_fn: Callable[[str, str], dict[str, Q]]) -> float:
        """Largest operator-norm defect of [M_x, M_y] - M_{[x,y]}."""
        worst = 0.0
        labels = list(self.generators)
        for x in labels:
            for y in labels:
                lhs = self.generators[x] @ self.generators[y] - self.generators[y] @ self.generators[x]
                for lbl, coef in bracket_fn(x, y).items():
                    lhs = lhs - float(coef) * self.generators[lbl]
                worst = max(worst, float(np.linalg.norm(lhs, 2)))
        return worst


def su2_rep(j) -> MatrixRep:
    """Standard (2j+1)-dimensional spin matrices around the lowest-weight vector."""
    two_j = 2 * j
    if two_j < 0 or abs(two_j - round(two_j)) > 1e-12:
        raise InvalidSpin(f"2j must be a nonnegative integer, got j={j}")
    two_j = int(round(two_j))
    dim = two_j + 1
    ms = np.array([-two_j / 2 + k for k in range(dim)])
    j0 = np.diag(ms).astype(complex)
    jp = np.zeros((dim, dim), dtype=complex)
    jval = two_j / 2
    for k in range(dim - 1):
        m = ms[k]
        jp[k + 1, k] = np.sqrt((jval - m) * (jval + m + 1))
    jm = jp.conj().T
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = 1.0
    return MatrixRep(
        name=f"su(2) spin {jval}",
        dim=dim,
        generators={"J0": j0, "J+": jp, "J-": jm},
        extreme_vector=e0,
        zvars=["z"],
        cs_factors=[[("z", jp)]],
        convention="direct",
        adjoint={"J0": "J0", "J+": "J-", "J-": "J+"},
    )


def _wedge_matrix(x: np.ndarray) -> np.ndarray:
    """Second exterior power of a 3x3 matrix in the basis e1^e2, e1^e3, e2^e3."""
    pairs = [(0, 1), (0, 2), (1, 2)]
    out = np.zeros((3, 3), dtype=complex)
    for b, (p, q) in enumerate(pairs):
        for r in range(3):
            # (x e_p) ^ e_q contribution
            if x[r, p] != 0 and r != q:
                i, j = (r, q) if r < q else (q, r)
                sign = 1.0 if r < q else -1.0
                out[pairs.index((i, j)), b] += sign * x[r, p]
            # e_p ^ (x e_q) contribution
            if x[r, q] != 0 and r != p:
                i, j = (p, r) if p < r else (r, p)
                sign = 1.0 if p < r else -1.0
                out[pairs.index((i, j)), b] += sign * x[r, q]
    return out


def su3_rep(kind: str = "fundamental") -> MatrixRep:
    """su(3) flag-chart representations: 'fundamental' or 'antifundamental wedge'.

    The fundamental has highest weight (1,0,0) and realizes the degree-one
    kernel factor; the wedge of two fundamentals has highest weight (1,1,0)
    and realizes the degree-two factor.
    """
    elem = {}
    for i in range(3):
        for j in range(3):
            m = np.zeros((3, 3), dtype=complex)
            m[i, j] = 1.0
            elem[f"C{i + 1}{j + 1}"] = m

    if kind == "fundamental":
        gens = elem
        e0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        name = "su(3) fundamental"
    elif kind in ("wedge", "antifundamental-wedge"):
        gens = {lbl: _wedge_matrix(m) for lbl, m in elem.items()}
        e0 = np.array([1.0, 0.0, 0.0], dtype=complex)  # e1 ^ e2
        name = "su(3) wedge"
    else:
        raise QuantumError(f"unknown su(3) representation kind {kind!r}")

    return MatrixRep(
        name=name,
        dim=3,
        generators=gens,
        extreme_vector=e0,
        zvars=["z12", "z13", "z23"],
        cs_factors=[
            [("z12", gens["C21"]), ("z13", gens["C31"])],
            [("z23", gens["C32"])],
        ],
        convention="symbol",
        adjoint={f"C{i}{j}": f"C{j}{i}" for i in (1, 2, 3) for j in (1, 2, 3)},
    )


def _zdict(rep: MatrixRep, z) -> dict[str, complex]:
    if isinstance(z, Mapping):
        return {v: complex(z[v]) for v in rep.zvars}
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (len(rep.zvars),):
        raise QuantumError("coordinate vector has the wrong length")
    return {v: complex(c) for v, c in zip(rep.zvars, z)}


def coherent_vector(rep: MatrixRep, z, chart: str = "matrix") -> np.ndarray:
    """Ordered-exponential coherent vector at chart point z (holomorphic in z).

    chart="matrix": the ordered factor product whose unipotent group element
    has the coordinates as matrix entries.  chart="canonical": the single
    exponential of the same Lie-algebra element (the two charts agree after
    the triangular change of variables).
    """
    zc = _zdict(rep, z)
    v = rep.extreme_vector.astype(complex)
    if chart == "matrix":
        for factor in reversed(rep.cs_factors):
            a = sum((zc[var] * m for var, m in factor), np.zeros((rep.dim, rep.dim), complex))
            v = expm(a) @ v
        return v
    if chart == "canonical":
        a = sum(
            (zc[var] * m for factor in rep.cs_factors for var, m in factor),
            np.zeros((rep.dim, rep.dim), complex),
        )
        return expm(a) @ v
    raise QuantumError(f"unknown chart {chart!r}")


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    """Closed-form reproducing kernels: su2(j), su11(k), grassmann(m,n), su3(j1,j2)."""

    family: str
    params: tuple

    @classmethod
    def su2(cls, j) -> "KernelSpec":
        return cls("su2", (j,))

    @classmethod
    def su11(cls, k) -> "KernelSpec":
        return cls("su11", (k,))

    @classmethod
    def grassmann(cls, m: int, n: int) -> "KernelSpec":
        return cls("grassmann", (m, n))

    @classmethod
    def su3(cls, j1: int, j2: int) -> "KernelSpec":
        return cls("su3", (j1, j2))

    def zvars(self) -> list[str]:
        if self.family in ("su2", "su11"):
            return ["z"]
        if self.family == "grassmann":
            m, n = self.params
            return [f"Z{i + 1}{p + 1}" for i in range(m) for p in range(n)]
        if self.family == "su3":
            return ["z12", "z13", "z23"]
        raise QuantumError(f"unknown kernel family {self.family!r}")


def _su3_deltas(z: np.ndarray, w: np.ndarray) -> tuple[complex, complex]:
    z12, z13, z23 = z
    w12, w13, w23 = np.conjugate(w)
    d1 = 1.0 + z12 * w12 + z13 * w13
    d2 = d1 * (1.0 + z23 * w23) - (z12 + z13 * w23) * (w12 + w13 * z23)
    return d1, d2


def kernel_eval(spec: KernelSpec, z, w=None) -> complex:
    """K(z, conj(w)); the diagonal K(z, conj(z)) is the squared CS norm."""
    zv = np.asarray(z, dtype=complex).reshape(-1)
    wv = zv if w is None else np.asarray(w, dtype=complex).reshape(-1)
    if spec.family == "su2":
        (j,) = spec.params
        two_j = int(round(2 * j))
        return (1.0 + zv[0] * np.conjugate(wv[0])) ** two_j
    if spec.family == "su11":
        (k,) = spec.params
        if abs(zv[0]) >= 1.0 or abs(wv[0]) >= 1.0:
            raise OutOfChart("su(1,1) chart is the open unit disk")
        return (1.0 - zv[0] * np.conjugate(wv[0])) ** (-2.0 * k)
    if spec.family == "grassmann":
        m, n = spec.params
        zm = zv.reshape(m, n)
        wm = wv.reshape(m, n)
        return complex(np.linalg.det(np.eye(n) + wm.conj().T @ zm))
    if spec.family == "su3":
        j1, j2 = spec.params
        d1, d2 = _su3_deltas(zv, wv)
        return d1 ** int(j1) * d2 ** int(j2)
    raise QuantumError(f"unknown kernel family {spec.family!r}")


def rep_kernel(rep: MatrixRep, z, w=None) -> complex:
    """Inner-product kernel of the matrix representation itself."""
    vz = coherent_vector(rep, z)
    vw = vz if w is None else coherent_vector(rep, w)
    return complex(np.vdot(vw, vz))


def su3_weights(j1: int, j2: int) -> tuple[Q, Q, Q]:
    """Highest-weight components (w1, w2, w3) with j1 = w1-w2, j2 = w2-w3."""
    return (Q(j1 + j2), Q(j2), Q(0))


# ---------------------------------------------------------------------------
# energy, metric, Poisson flow
# ---------------------------------------------------------------------------


def energy_function(rep: MatrixRep, ham: LinearHamiltonian | np.ndarray, z) -> float:
    """Rayleigh quotient of the assembled Hamiltonian at the coherent vector."""
    h = rep.matrix_of(ham)
    v = coherent_vector(rep, z)
    value = complex(np.vdot(v, h @ v) / np.vdot(v, v))
    if abs(value.imag) > 1e-12 * max(1.0, abs(value)):
        raise AssertionError("energy function came out non-real")
    return float(value.real)


def symbol_energy(
    spec: KernelSpec,
    diff_rep: Representation,
    ham: LinearHamiltonian,
    z,
    step: float = 1e-6,
) -> float:
    """Energy from a closed-form kernel and a symbol-convention operator table.

    The covariant symbol of a generator is (D_g K)(., w)|_{w=z} / K(z, z);
    derivatives in the holomorphic slot are taken by central differences.
    The table must carry numeric weights.
    """
    zv = np.asarray(z, dtype=complex).reshape(-1)
    names = spec.zvars()
    if names != list(diff_rep.zvars):
        raise QuantumError("kernel and operator table use different charts")
    kzz = kernel_eval(spec, zv)

    def k_first_slot(pt: np.ndarray) -> complex:
        return kernel_eval(spec, pt, zv)

    grad = np.empty(len(names), dtype=complex)
    for a in range(len(names)):
        e = np.zeros(len(names), dtype=complex)
        e[a] = step
        grad[a] = (k_first_slot(zv + e) - k_first_slot(zv - e)) / (2 * step)

    zvals = {v: zv[i] for i, v in enumerate(names)}
    total = 0.0 + 0.0j
    for lbl, coef in ham.eps.items():
        op = diff_rep.ops[lbl]
        val = op.scalar.eval(zvals) * kzz
        for v, qpoly in op.partials.items():
            val += qpoly.eval(zvals) * grad[names.index(v)]
        total += complex(coef) * val
    value = total / kzz
    if abs(value.imag) > 1e-9 * max(1.0, abs(value)):
        raise AssertionError("symbol energy came out non-real")
    return float(value.real)


def _log_kernel_fn(source, vars_idx: Sequence[int], zfull: np.ndarray):
    if isinstance(source, MatrixRep):
        def logk(x: np.ndarray) -> float:
            pt = zfull.copy()
            pt[list(vars_idx)] = x
            v = coherent_vector(source, pt)
            return float(np.log(np.vdot(v, v).real))
        return logk
    if isinstance(source, KernelSpec):
        def logk(x: np.ndarray) -> float:
            pt = zfull.copy()
            pt[list(vars_idx)] = x
            return float(np.log(kernel_eval(source, pt).real))
        return logk
    if callable(source):
        def logk(x: np.ndarray) -> float:
            pt = zfull.copy()
            pt[list(vars_idx)] = x
            return float(np.log(source(pt)))
        return logk
    raise QuantumError("metric source must be a MatrixRep, KernelSpec or callable")


def _complex_hessian(logk, x0: np.ndarray, h: float) -> np.ndarray:
    """G_{ab} = d^2 logk / dz_a dconj(z_b) by real central differences."""
    d = len(x0)
    reals = np.concatenate([x0.real, x0.imag])

    def f(r: np.ndarray) -> float:
        return logk(r[:d] + 1j * r[d:])

    size = 2 * d
    hess = np.zeros((size, size))
    for a in range(size):
        for b in range(a, size):
            ea = np.zeros(size)
            eb = np.zeros(size)
            ea[a] = h
            eb[b] = h
            if a == b:
                val = (f(reals + ea) - 2.0 * f(reals) + f(reals - ea)) / h**2
            else:
                val = (
                    f(reals + ea + eb)
                    - f(reals + ea - eb)
                    - f(reals - ea + eb)
                    + f(reals - ea - eb)
                ) / (4.0 * h**2)
            hess[a, b] = hess[b, a] = val
    g = np.zeros((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            g[a, b] = 0.25 * (
                hess[a, b]
                + hess[d + a, d + b]
                + 1j * (hess[a, d + b] - hess[d + a, b])
            )
    return g


def kahler_metric(
    source,
    z,
    vars_idx: Sequence[int] | None = None,
    step: float = 1e-3,
    check_positive: bool = True,
) -> np.ndarray:
    """Metric d^2 log K / dz dconj(z) by central differences with one
    Richardson refinement; hermitized.  Raises SingularMetric when a
    non-positive eigenvalue shows up (and positivity checking is on)."""
    zfull = np.asarray(z, dtype=complex).reshape(-1)
    if vars_idx is None:
        vars_idx = list(range(len(zfull)))
    logk = _log_kernel_fn(source, vars_idx, zfull)
    x0 = zfull[list(vars_idx)]
    g_h = _complex_hessian(logk, x0, step)
    g_h2 = _complex_hessian(logk, x0, step / 2.0)
    g = (4.0 * g_h2 - g_h) / 3.0
    g = 0.5 * (g + g.conj().T)
    if check_positive:
        eigs = np.linalg.eigvalsh(g)
        if eigs.min() <= 1e-7 * max(1.0, float(np.abs(eigs).max())):
            raise SingularMetric(f"metric eigenvalues {eigs} include a non-positive one")
    return g


def poisson_flow(
    source,
    ham,
    z,
    diff_rep: Representation | None = None,
    vars_idx: Sequence[int] | None = None,
    step: float = 1e-4,
    metric_step: float = 1e-3,
) -> np.ndarray:
    """Velocity dz/dt = -i G^{-1} dE/dconj(z) of the dequantized flow.

    `source` selects the energy/metric backend: a MatrixRep (Rayleigh
    quotient) or a KernelSpec (then `diff_rep` supplies the symbols).
    Returns the velocity for the selected chart directions.
    """
    zfull = np.asarray(z, dtype=complex).reshape(-1)
    if vars_idx is None:
        vars_idx = list(range(len(zfull)))

    if isinstance(source, MatrixRep):
        hmat = source.matrix_of(ham)

        def energy(pt: np.ndarray) -> float:
            v = coherent_vector(source, pt)
            return float((np.vdot(v, hmat @ v) / np.vdot(v, v)).real)

    elif isinstance(source, KernelSpec):
        if diff_rep is None:
            raise QuantumError("kernel-backed Poisson flow needs an operator table")
        # the symbol pairing carries conjugated coefficients relative to the
        # vector-side Hamiltonian; convert so both backends see the same H
        ham_sym = ham.conjugated() if diff_rep.convention == "symbol" else ham

        def energy(pt: np.ndarray) -> float:
            return symbol_energy(source, diff_rep, ham_sym, pt)

    else:
        raise QuantumError("Poisson flow source must be a MatrixRep or KernelSpec")

    g = kahler_metric(source, zfull, vars_idx, step=step)

    grad_bar = np.empty(len(vars_idx), dtype=complex)
    for k, a in enumerate(vars_idx):
        ex = np.zeros(len(zfull), dtype=complex)
        ex[a] = step
        ey = np.zeros(len(zfull), dtype=complex)
        ey[a] = 1j * step
        de_dx = (energy(zfull + ex) - energy(zfull - ex)) / (2 * step)
        de_dy = (energy(zfull + ey) - energy(zfull - ey)) / (2 * step)
        grad_bar[k] = 0.5 * (de_dx + 1j * de_dy)

    # dz_g/dt = -i sum_a (G^{-1})_{a g} dE/dconj(z_a): the bracket contracts
    # the metric inverse against the gradient on its first index.
    return -1j * np.linalg.solve(g.T, grad_bar)


# ---------------------------------------------------------------------------
# Schrödinger propagation and coherence checks
# ---------------------------------------------------------------------------


def schrodinger_propagate(rep: MatrixRep, ham, psi0: np.ndarray, t: float) -> np.ndarray:
    """psi(t) = exp(-i H t) psi0 through the eigendecomposition of hermitian H."""
    h = rep.matrix_of(ham) if isinstance(rep, MatrixRep) else np.asarray(rep)
    evals, vecs = np.linalg.eigh(h)
    psi0 = np.asarray(psi0, dtype=complex)
    psi = vecs @ (np.exp(-1j * evals * t) * (vecs.conj().T @ psi0))
    n0, n1 = np.linalg.norm(psi0), np.linalg.norm(psi)
    if abs(n1 - n0) > 1e-12 * max(1.0, n0):
        raise AssertionError("propagation lost unitarity")
    return psi


def matched_hamiltonian(diff_rep: Representation, ham: LinearHamiltonian) -> LinearHamiltonian:
    """Coefficients whose polynomial flow tracks the Schrödinger evolution.

    Direct-convention tables pair with the matrix Hamiltonian as is; symbol
    convention tables pair with the conjugated (for hermitian input:
    transposed) coefficients.
    """
    if diff_rep.convention == "direct":
        return ham
    return ham.conjugated()


def coherence_fidelity(rep: MatrixRep, psi: np.ndarray, z) -> float:
    """|<e_z, psi>|^2 / (|e_z|^2 |psi|^2)."""
    v = coherent_vector(rep, z)
    num = abs(np.vdot(v, psi)) ** 2
    den = float(np.vdot(v, v).real) * float(np.vdot(psi, psi).real)
    return float(num / den)


@dataclass
class CoherentContext:
    """Adapter giving the phase quadrature its energy and overlap callbacks."""

    rep: MatrixRep
    hamiltonian: np.ndarray
    fd_step: float = 1e-5

    @classmethod
    def build(cls, rep: MatrixRep, ham: LinearHamiltonian | np.ndarray) -> "CoherentContext":
        return cls(rep=rep, hamiltonian=rep.matrix_of(ham))

    def energy(self, z: np.ndarray) -> float:
        v = coherent_vector(self.rep, z)
        return float((np.vdot(v, self.hamiltonian @ v) / np.vdot(v, v)).real)

    def overlap_velocity(self, z: np.ndarray, zdot: np.ndarray) -> complex:
        """<e_z, d/dt e_z> / <e_z, e_z> along the given chart velocity."""
        v = coherent_vector(self.rep, z)
        dv = np.zeros_like(v)
        for a in range(len(z)):
            e = np.zeros(len(z), dtype=complex)
            e[a] = self.fd_step
            dv = dv + zdot[a] * (
                coherent_vector(self.rep, z + e) - coherent_vector(self.rep, z - e)
            ) / (2 * self.fd_step)
        return complex(np.vdot(v, dv) / np.vdot(v, v))
