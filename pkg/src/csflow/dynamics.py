"""Equations of motion generated by linear Hamiltonians, and their integration.

For a Hamiltonian H = sum_l eps_l G_l over the generators of an operator
table, the chart coordinates obey  i dz_a/dt = sum_l eps_l Q_{l,a}(z),  where
Q_{l,a} is the coefficient of d/dz_a in the table entry of G_l; the scalar
parts never enter.  Specializations provided here: the oscillator preset
(affine flow), the matrix Riccati flow on Grassmannian charts with its
compact/non-compact sign split, and the X Y^{-1} linearization of the latter.

The total phase along a trajectory splits into a dynamical part, the time
integral of the energy function, and a geometric (Berry) part, the imaginary
part of the integrated normalized overlap of the coherent family with its own
time derivative; both are computed by cumulative composite Simpson quadrature
on the trajectory samples with an automatic resolution check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Callable, Mapping, Sequence

import numpy as np

from .symalg import ZERO, MultiPoly
from .synth import Representation


class DynamicsError(ValueError):
    pass


class NonHermitianHamiltonian(DynamicsError):
    pass


class NonHermitianOmega(DynamicsError):
    pass


class NonHermitianBlocks(DynamicsError):
    pass


class DimensionMismatch(DynamicsError):
    pass


class SingularY(DynamicsError):
    def __init__(self, t: float):
        super().__init__(f"Y(t) became numerically singular at t={t}")
        self.t = t


class QuadratureResolutionTooCoarse(DynamicsError):
    pass


_HERM_TOL = 1e-12


@dataclass(frozen=True)
class LinearHamiltonian:
    """Coefficients eps_l over generator labels; hermitian when numeric."""

    eps: Mapping[str, complex | MultiPoly]

    @classmethod
    def from_matrix(cls, eps: np.ndarray) -> "LinearHamiltonian":
        """eps_{ij} C_ij coefficients from a square (hermitian) matrix."""
        n = eps.shape[0]
        if eps.shape != (n, n):
            raise DimensionMismatch("coefficient matrix must be square")
        return cls(
            eps={
                f"C{i + 1}{j + 1}": complex(eps[i, j])
                for i in range(n)
                for j in range(n)
                if eps[i, j] != 0
            }
        )

    def is_symbolic(self) -> bool:
        return any(isinstance(v, MultiPoly) for v in self.eps.values())

    def validate_hermitian(self, adjoint: Mapping[str, str]) -> None:
        if self.is_symbolic():
            return
        for lbl, value in self.eps.items():
            partner = adjoint.get(lbl)
            if partner is None:
                raise NonHermitianHamiltonian(f"no adjoint partner known for {lbl}")
            other = complex(self.eps.get(partner, 0.0))
            if abs(complex(value) - other.conjugate()) > _HERM_TOL * max(1.0, abs(value)):
                raise NonHermitianHamiltonian(
                    f"eps[{partner}] must be the conjugate of eps[{lbl}]"
                )

    def conjugated(self) -> "LinearHamiltonian":
        if self.is_symbolic():
            raise DynamicsError("cannot conjugate symbolic coefficients")
        return LinearHamiltonian({k: complex(v).conjugate() for k, v in self.eps.items()})


@dataclass
class FlowField:
    """Right-hand sides i dz_a/dt = rhs_a(z), with a compiled evaluator."""

    variables: list[str]
    rhs: dict[str, MultiPoly]
    velocity_fn: Callable[[np.ndarray], np.ndarray] | None = None
    _compiled: list[tuple[np.ndarray, np.ndarray]] | None = field(default=None, repr=False)

    def rhs_poly(self, var: str) -> MultiPoly:
        return self.rhs.get(var, ZERO)

    def is_symbolic(self) -> bool:
        known = set(self.variables)
        return any(p.variables() - known for p in self.rhs.values())

    def _compile(self) -> list[tuple[np.ndarray, np.ndarray]]:
        if self._compiled is None:
            if self.is_symbolic():
                raise DynamicsError("field has free symbols; substitute before integrating")
            index = {v: k for k, v in enumerate(self.variables)}
            compiled = []
            for v in self.variables:
                poly = self.rhs_poly(v)
                coefs = np.array(
                    [complex(c) if not isinstance(c, Q) else float(c) for c in poly.terms.values()],
                    dtype=complex,
                )
                expo = np.zeros((len(poly.terms), len(self.variables)), dtype=np.int64)
                for t_i, mono in enumerate(poly.terms):
                    for name, e in mono:
                        expo[t_i, index[name]] = e
                compiled.append((coefs, expo))
            self._compiled = compiled
        return self._compiled

    def velocity(self, z: np.ndarray) -> np.ndarray:
        """dz/dt = -i * rhs(z)."""
        if self.velocity_fn is not None:
            return self.velocity_fn(z)
        out = np.empty(len(self.variables), dtype=complex)
        for k, (coefs, expo) in enumerate(self._compile()):
            if len(coefs) == 0:
                out[k] = 0.0
            else:
                out[k] = coefs @ np.prod(z[None, :] ** expo, axis=1)
        return -1j * out

    def render(self) -> str:
        return "\n".join(f"i d{v}/dt = {self.rhs_poly(v).render()}" for v in self.variables)


def assemble_rhs(rep: Representation, ham: LinearHamiltonian) -> FlowField:
    """Read the flow off the Q polynomials of the operator table.

    With numeric coefficients the Hamiltonian must be hermitian with respect
    to the table's adjoint pairing; symbolic coefficients are passed through
    unconstrained so the field can be inspected as an exact identity.
    """
    ham.validate_hermitian(rep.adjoint)
    unknown = set(ham.eps) - set(rep.ops)
    if unknown:
        raise DynamicsError(f"unknown generator labels: {sorted(unknown)}")
    rhs: dict[str, MultiPoly] = {}
    for var in rep.zvars:
        total = ZERO
        for lbl, coef in ham.eps.items():
            q = rep.q_poly(lbl, var)
            if q.is_zero():
                continue
            total = total + q * MultiPoly.coerce(coef)
        rhs[var] = total
    return FlowField(variables=list(rep.zvars), rhs=rhs)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def oscillator_field(omega: np.ndarray, f: np.ndarray) -> FlowField:
    """i dz_a/dt = omega_{a,m} z_m + f_a for n uncoupled-mode coordinates."""
    omega = np.asarray(omega, dtype=complex)
    f = np.asarray(f, dtype=complex)
    n = omega.shape[0]
    if omega.shape != (n, n) or f.shape != (n,):
        raise DimensionMismatch("omega must be n x n and f length n")
    if np.linalg.norm(omega - omega.conj().T) > _HERM_TOL * max(1.0, np.linalg.norm(omega)):
        raise NonHermitianOmega("omega must be hermitian")
    names = [f"z{k + 1}" for k in range(n)]
    rhs = {}
    for a in range(n):
        poly = MultiPoly.const(complex(f[a])) if f[a] != 0 else ZERO
        for m in range(n):
            if omega[a, m] != 0:
                poly = poly + MultiPoly.var(names[m]) * complex(omega[a, m])
        rhs[names[a]] = poly
    return FlowField(
        variables=names,
        rhs=rhs,
        velocity_fn=lambda z: -1j * (omega @ z + f),
    )


def oscillator_energy(omega: np.ndarray, f: np.ndarray, z: np.ndarray) -> float:
    """Normalized expectation of the mode Hamiltonian in a Glauber state."""
    z = np.asarray(z, dtype=complex)
    value = np.vdot(z, np.asarray(omega) @ z) + np.vdot(z, f) + np.vdot(f, z).conjugate()
    return float(value.real)


def _check_riccati_blocks(eps01, eps02, epsp, epsm):
    eps01 = np.atleast_2d(np.asarray(eps01, dtype=complex))
    eps02 = np.atleast_2d(np.asarray(eps02, dtype=complex))
    epsp = np.atleast_2d(np.asarray(epsp, dtype=complex))
    epsm = np.atleast_2d(np.asarray(epsm, dtype=complex))
    m, n = epsp.shape
    if eps01.shape != (m, m) or eps02.shape != (n, n) or epsm.shape != (n, m):
        raise DimensionMismatch(
            f"expected blocks m x m, n x n, m x n, n x m with m={m}, n={n}"
        )
    for name, blk in (("eps01", eps01), ("eps02", eps02)):
        if np.linalg.norm(blk - blk.conj().T) > _HERM_TOL * max(1.0, np.linalg.norm(blk)):
            raise NonHermitianBlocks(f"{name} must be hermitian")
    if np.linalg.norm(epsm - epsp.conj().T) > _HERM_TOL * max(1.0, np.linalg.norm(epsp)):
        raise NonHermitianBlocks("epsm must be the conjugate transpose of epsp")
    return eps01, eps02, epsp, epsm, m, n


def _riccati_sign(variant: str) -> int:
    # The sign multiplying Z eps^- Z.  With the hermitian pairing
    # epsm = epsp^dagger, the compact family carries -Z eps^- Z (this is the
    # choice that reduces to the rank-one compact flow), the non-compact
    # family +Z eps^- Z.
    if variant == "compact":
        return -1
    if variant == "noncompact":
        return +1
    raise DynamicsError(f"variant must be 'compact' or 'noncompact', got {variant!r}")


def matrix_riccati_field(eps01, eps02, epsp, epsm, variant: str = "compact") -> FlowField:
    """i dZ/dt = -Z eps02 + eps01 Z + eps^+ [-/+] Z eps^- Z, flattened row-major."""
    eps01, eps02, epsp, epsm, m, n = _check_riccati_blocks(eps01, eps02, epsp, epsm)
    sign = _riccati_sign(variant)
    names = [f"Z{i + 1}{p + 1}" for i in range(m) for p in range(n)]
    zp = [[MultiPoly.var(names[i * n + p]) for p in range(n)] for i in range(m)]

    rhs: dict[str, MultiPoly] = {}
    for i in range(m):
        for p in range(n):
            poly = MultiPoly.const(complex(epsp[i, p])) if epsp[i, p] != 0 else ZERO
            for q_ in range(n):
                if eps02[q_, p] != 0:
                    poly = poly - zp[i][q_] * complex(eps02[q_, p])
            for k in range(m):
                if eps01[i, k] != 0:
                    poly = poly + zp[k][p] * complex(eps01[i, k])
            for q_ in range(n):
                for k in range(m):
                    if epsm[q_, k] != 0:
                        poly = poly + zp[i][q_] * zp[k][p] * (sign * complex(epsm[q_, k]))
            rhs[names[i * n + p]] = poly

    def velocity(zflat: np.ndarray) -> np.ndarray:
        Z = zflat.reshape(m, n)
        dZ = -Z @ eps02 + eps01 @ Z + epsp + sign * (Z @ epsm @ Z)
        return (-1j * dZ).reshape(m * n)

    return FlowField(variables=names, rhs=rhs, velocity_fn=velocity)


def cp2_riccati_blocks(eps3: np.ndarray):
    """Frozen dictionary from a 3x3 hermitian coefficient matrix to the
    m=1, n=2 compact Riccati blocks of the projective-plane chart.

    eps01 = (-eps_11), eps02 = -eps3[1:, 1:], eps^+ = [eps_12, eps_13],
    eps^- = (eps^+)^dagger, compact variant.
    """
    eps3 = np.asarray(eps3, dtype=complex)
    eps01 = np.array([[-eps3[0, 0]]])
    eps02 = -eps3[1:, 1:]
    epsp = eps3[0:1, 1:]
    epsm = epsp.conj().T
    return eps01, eps02, epsp, epsm, "compact"


# ---------------------------------------------------------------------------
# integrators
# ---------------------------------------------------------------------------


@dataclass
class IntegratorControls:
    method: str = "rk45"
    dt: float = 1e-2
    rtol: float = 1e-9
    atol: float = 1e-12
    n_samples: int = 201
    blowup_threshold: float = 1e8
    min_step: float = 1e-13
    max_step: float = float("inf")


@dataclass
class Trajectory:
    variables: list[str]
    times: np.ndarray
    states: np.ndarray            # (len(times), len(variables)) complex
    status: str = "completed"     # completed | blow_up | step_failure
    t_fail: float | None = None
    phi_dynamical: np.ndarray | None = None
    phi_berry: np.ndarray | None = None

    @property
    def phi_total(self) -> np.ndarray | None:
        if self.phi_dynamical is None or self.phi_berry is None:
            return None
        return self.phi_dynamical + self.phi_berry

    def state_at(self, k: int) -> np.ndarray:
        return self.states[k]

    def to_csv(self, path: str) -> None:
        cols = ["t"]
        for v in self.variables:
            cols += [f"Re_{v}", f"Im_{v}"]
        have_phase = self.phi_dynamical is not None
        if have_phase:
            cols += ["phi_dynamical", "phi_berry", "phi_total"]
        lines = [",".join(cols)]
        tot = self.phi_total
        for k, t in enumerate(self.times):
            row = ["%.17g" % t]
            for c in self.states[k]:
                row += ["%.17g" % c.real, "%.17g" % c.imag]
            if have_phase:
                row += [
                    "%.17g" % self.phi_dynamical[k],
                    "%.17g" % self.phi_berry[k],
                    "%.17g" % tot[k],
                ]
            lines.append(",".join(row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path: str | None = None) -> dict:
        doc = {
            "variables": list(self.variables),
            "status": self.status,
            "t_fail": self.t_fail,
            "times": ["%.17g" % t for t in self.times],
            "states": [
                [["%.17g" % c.real, "%.17g" % c.imag] for c in row] for row in self.states
            ],
        }
        if self.phi_dynamical is not None:
            doc["phi_dynamical"] = ["%.17g" % x for x in self.phi_dynamical]
            doc["phi_berry"] = ["%.17g" % x for x in self.phi_berry]
            doc["phi_total"] = ["%.17g" % x for x in self.phi_total]
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
        return doc


_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _dp_step(fn, t, y, h):
    k = [fn(t, y)]
    for s in range(1, 7):
        k.append(fn(t + _DP_C[s] * h, y + h * sum(a * ki for a, ki in zip(_DP_A[s], k))))
    karr = np.array(k)
    y5 = y + h * (_DP_B5 @ karr)
    y4 = y + h * (_DP_B4 @ karr)
    return y5, y5 - y4


def integrate(field: FlowField, z0, t_end: float, controls: IntegratorControls | None = None) -> Trajectory:
    """Integrate the flow from t=0 on a uniform sample grid.

    Blow-up (state norm beyond the threshold) and step failure are reported
    through the trajectory status with the failure time, not raised.
    """
    controls = controls or IntegratorControls()
    z0 = np.asarray(z0, dtype=complex).reshape(-1)
    if z0.shape != (len(field.variables),):
        raise DimensionMismatch("initial state has the wrong dimension")
    if not np.all(np.isfinite(z0.view(float))):
        raise DynamicsError("initial state must be finite")

    def fn(t, y):
        return field.velocity(y)

    times = np.linspace(0.0, t_end, controls.n_samples)
    states = [z0.copy()]
    y = z0.copy()
    status, t_fail = "completed", None

    if controls.method == "rk4":
        for k in range(1, len(times)):
            t0, t1 = times[k - 1], times[k]
            nsub = max(1, int(np.ceil((t1 - t0) / controls.dt)))
            h = (t1 - t0) / nsub
            t = t0
            for _ in range(nsub):
                k1 = fn(t, y)
                k2 = fn(t + h / 2, y + h / 2 * k1)
                k3 = fn(t + h / 2, y + h / 2 * k2)
                k4 = fn(t + h, y + h * k3)
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                t += h
            if not np.all(np.isfinite(y.view(float))) or np.max(np.abs(y)) > controls.blowup_threshold:
                status, t_fail = "blow_up", t1
                break
            states.append(y.copy())
    elif controls.method == "rk45":
        h = min((times[1] - times[0]) / 4 if len(times) > 1 else t_end / 4, controls.max_step)
        for k in range(1, len(times)):
            t, t1 = times[k - 1], times[k]
            failed = False
            while t < t1 - 1e-15 * max(1.0, abs(t1)):
                h = min(h, t1 - t, controls.max_step)
                y5, err = _dp_step(fn, t, y, h)
                scale = controls.atol + controls.rtol * np.maximum(np.abs(y), np.abs(y5))
                enorm = float(np.sqrt(np.mean((np.abs(err) / scale) ** 2))) if len(err) else 0.0
                if not np.isfinite(enorm):
                    enorm = np.inf
                if enorm <= 1.0:
                    t += h
                    y = y5
                    if np.max(np.abs(y)) > controls.blowup_threshold:
                        status, t_fail = "blow_up", t
                        failed = True
                        break
                factor = 0.9 * (1.0 / enorm) ** 0.2 if enorm > 0 else 5.0
                h *= min(5.0, max(0.2, factor))
                if h < controls.min_step * max(1.0, abs(t1)):
                    status, t_fail = "step_failure", t
                    failed = True
                    break
            if failed:
                break
            states.append(y.copy())
    else:
        raise DynamicsError(f"unknown method {controls.method!r}")

    got = len(states)
    return Trajectory(
        variables=list(field.variables),
        times=times[:got],
        states=np.array(states),
        status=status,
        t_fail=t_fail,
    )


# ---------------------------------------------------------------------------
# Riccati linearization
# ---------------------------------------------------------------------------


@dataclass
class RiccatiLinearization:
    times: np.ndarray
    x: np.ndarray             # (k, m, n)
    y: np.ndarray             # (k, n, n)
    z: np.ndarray             # (k, m, n), X Y^{-1}
    y_condition: np.ndarray
    flagged: list[int]        # indices with near-singular Y


def riccati_linearize(
    eps01, eps02, epsp, epsm, variant, x0, y0, t_end: float, n_samples: int = 101,
    cond_threshold: float = 1e12,
) -> RiccatiLinearization:
    """Propagate the linear system equivalent to the matrix Riccati flow.

    The block generator is -i [[eps01, eps^+], [s eps^-, eps02]] with s = +1
    on the compact family and s = -1 on the non-compact one, so that
    Z = X Y^{-1} solves the corresponding Riccati equation.  Samples with an
    ill-conditioned Y are flagged; a singular initial Y raises.
    """
    from scipy.linalg import expm

    eps01, eps02, epsp, epsm, m, n = _check_riccati_blocks(eps01, eps02, epsp, epsm)
    sign = _riccati_sign(variant)
    x0 = np.asarray(x0, dtype=complex).reshape(m, n)
    y0 = np.asarray(y0, dtype=complex).reshape(n, n)
    if np.linalg.cond(y0) > cond_threshold:
        raise SingularY(0.0)

    h = np.zeros((m + n, m + n), dtype=complex)
    h[:m, :m] = -1j * eps01
    h[:m, m:] = -1j * epsp
    h[m:, :m] = sign * 1j * epsm
    h[m:, m:] = -1j * eps02

    times = np.linspace(0.0, t_end, n_samples)
    w0 = np.vstack([x0, y0])
    xs, ys, zs, conds, flagged = [], [], [], [], []
    for k, t in enumerate(times):
        w = expm(h * t) @ w0
        xk, yk = w[:m, :], w[m:, :]
        ck = float(np.linalg.cond(yk))
        xs.append(xk)
        ys.append(yk)
        conds.append(ck)
        if ck > cond_threshold:
            flagged.append(k)
            zs.append(np.full((m, n), np.nan, dtype=complex))
        else:
            zs.append(xk @ np.linalg.inv(yk))
    return RiccatiLinearization(
        times=times,
        x=np.array(xs),
        y=np.array(ys),
        z=np.array(zs),
        y_condition=np.array(conds),
        flagged=flagged,
    )


# ---------------------------------------------------------------------------
# phase along a trajectory
# ---------------------------------------------------------------------------


def cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, composite Simpson with a
    quadratic-endpoint rule on the odd prefixes."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    for k in range(1, len(y)):
        if k % 2 == 0:
            out[k] = out[k - 2] + h / 3.0 * (y[k - 2] + 4.0 * y[k - 1] + y[k])
        else:
            if k == 1:
                out[k] = h / 2.0 * (y[0] + y[1])
                if len(y) > 2:
                    out[k] = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
            else:
                out[k] = out[k - 1] + h / 12.0 * (-y[k - 2] + 8.0 * y[k - 1] + 5.0 * y[k])
    return out


def phase_along(
    trajectory: Trajectory,
    context,
    field: FlowField | None = None,
    tol: float = 1e-7,
) -> Trajectory:
    """Attach the dynamical and geometric phase parts to a trajectory.

    `context` must provide energy(z) -> float and overlap_velocity(z, zdot)
    -> complex, the normalized overlap of the coherent family with its time
    derivative.  The quadrature is re-run on the coarsened grid; if the total
    phase moves by more than `tol`, the sampling is declared too coarse.
    """
    times = trajectory.times
    if len(times) < 5:
        raise QuadratureResolutionTooCoarse("need at least 5 samples")
    h = float(times[1] - times[0])
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=1e-12):
        raise DynamicsError("phase quadrature requires a uniform grid")

    energies = np.empty(len(times))
    berry = np.empty(len(times))
    for k in range(len(times)):
        z = trajectory.states[k]
        zdot = field.velocity(z) if field is not None else context.velocity(z)
        energies[k] = context.energy(z)
        berry[k] = -float(context.overlap_velocity(z, zdot).imag)

    phi_dyn = -cumulative_simpson(energies, h)
    phi_ber = cumulative_simpson(berry, h)

    # resolution check at the last index shared with the coarsened grid
    last = (len(times) - 1) // 2 * 2
    coarse = -cumulative_simpson(energies[::2], 2 * h) + cumulative_simpson(berry[::2], 2 * h)
    drift = abs(coarse[last // 2] - (phi_dyn[last] + phi_ber[last]))
    if drift > tol * max(1.0, abs(phi_dyn[last] + phi_ber[last])):
        raise QuadratureResolutionTooCoarse(
            f"halving the sampling moved the phase by {drift:.3e}"
        )

    trajectory.phi_dynamical = phi_dyn
    trajectory.phi_berry = phi_ber
    return trajectory
