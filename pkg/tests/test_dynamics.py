import numpy as np
import pytest

from csflow.dynamics import (
    DimensionMismatch,
    FlowField,
    IntegratorControls,
    LinearHamiltonian,
    NonHermitianBlocks,
    NonHermitianHamiltonian,
    NonHermitianOmega,
    assemble_rhs,
    cp2_riccati_blocks,
    cumulative_simpson,
    integrate,
    matrix_riccati_field,
    oscillator_energy,
    oscillator_field,
    riccati_linearize,
)
from csflow.symalg import MultiPoly
from csflow.synth import golden_tables, su_flag_representation

su2 = golden_tables()["su2"]
su3 = golden_tables()["su3"]


def sym(name):
    return MultiPoly.var(name)


def su3_symbolic_field():
    eps = LinearHamiltonian(
        {f"C{i}{j}": sym(f"e{i}{j}") for i in (1, 2, 3) for j in (1, 2, 3)}
    )
    return assemble_rhs(su3, eps)


# -- assembling fields -------------------------------------------------------


def test_su2_field_is_scalar_riccati():
    eps = LinearHamiltonian({"J0": sym("e0"), "J+": sym("e+"), "J-": sym("e-")})
    field = assemble_rhs(su2, eps)
    z = MultiPoly.var("z")
    want = sym("e+") + sym("e0") * z - sym("e-") * z ** 2
    assert field.rhs_poly("z") == want


def test_su3_field_matches_flag_equations():
    field = su3_symbolic_field()
    z12, z13, z23 = (MultiPoly.var(v) for v in ("z12", "z13", "z23"))
    e = {f"{i}{j}": sym(f"e{i}{j}") for i in (1, 2, 3) for j in (1, 2, 3)}
    want12 = (
        -e["11"] * z12 + e["12"] - e["21"] * z12 ** 2 + e["22"] * z12
        - e["31"] * z12 * z13 + e["32"] * z13
    )
    want13 = (
        -e["11"] * z13 + e["13"] - e["21"] * z12 * z13 + e["23"] * z12
        - e["31"] * z13 ** 2 + e["33"] * z13
    )
    want23 = (
        e["21"] * (z12 * z23 - z13) - e["22"] * z23 + e["23"]
        + e["31"] * (z12 * z23 - z13) * z23 - e["32"] * z23 ** 2 + e["33"] * z23
    )
    assert field.rhs_poly("z12") == want12
    assert field.rhs_poly("z13") == want13
    assert field.rhs_poly("z23") == want23


def test_flag_decoupling_exact():
    field = su3_symbolic_field()
    assert field.rhs_poly("z12").diff("z23").is_zero()
    assert field.rhs_poly("z13").diff("z23").is_zero()


def test_zero_hamiltonian_zero_field():
    field = assemble_rhs(su3, LinearHamiltonian({}))
    assert all(field.rhs_poly(v).is_zero() for v in field.variables)


def test_hermiticity_enforced():
    with pytest.raises(NonHermitianHamiltonian):
        assemble_rhs(su2, LinearHamiltonian({"J+": 1.0, "J-": 2.0, "J0": 0.0}))
    with pytest.raises(NonHermitianHamiltonian):
        assemble_rhs(su2, LinearHamiltonian({"J0": 1j}))
    # hermitian pairs pass
    assemble_rhs(su2, LinearHamiltonian({"J+": 1 + 2j, "J-": 1 - 2j, "J0": 0.5}))


def test_symbolic_field_refuses_numeric_integration():
    field = su3_symbolic_field()
    with pytest.raises(Exception):
        integrate(field, np.zeros(3, complex), 1.0)


# -- integrators -------------------------------------------------------------


def test_zero_field_constant_trajectory():
    field = assemble_rhs(su3, LinearHamiltonian({}))
    z0 = np.array([0.3 + 0.1j, -0.2j, 0.7])
    traj = integrate(field, z0, 3.0)
    assert traj.status == "completed"
    assert np.allclose(traj.states, z0[None, :], atol=1e-14)


def test_su2_rotation_closed_form():
    eps0 = 0.83
    field = assemble_rhs(su2, LinearHamiltonian({"J0": eps0}))
    z0 = 0.4 - 0.25j
    traj = integrate(field, [z0], 5.0, IntegratorControls(rtol=1e-10))
    exact = z0 * np.exp(-1j * eps0 * traj.times)
    assert np.max(np.abs(traj.states[:, 0] - exact)) <= 1e-9


def test_oscillator_closed_form_n1():
    omega = np.array([[1.7]])
    f = np.array([0.3 - 0.2j])
    field = oscillator_field(omega, f)
    z0 = 0.5 + 0.1j
    traj = integrate(field, [z0], 5.0, IntegratorControls(rtol=1e-11))
    w = omega[0, 0].real
    exact = np.exp(-1j * w * traj.times) * (z0 + f[0] / w) - f[0] / w
    assert np.max(np.abs(traj.states[:, 0] - exact)) <= 1e-9


def test_oscillator_zero_frequency_quadrature():
    field = oscillator_field(np.zeros((1, 1)), np.array([0.4 + 0.1j]))
    traj = integrate(field, [0.2], 2.0)
    exact = 0.2 - 1j * (0.4 + 0.1j) * traj.times
    assert np.max(np.abs(traj.states[:, 0] - exact)) <= 1e-10


def test_oscillator_n2_diagonal_decoupled():
    omega = np.diag([1.0, 2.0]).astype(complex)
    field = oscillator_field(omega, np.zeros(2))
    z0 = np.array([0.5, -0.3 + 0.2j])
    traj = integrate(field, z0, 4.0)
    exact = z0[None, :] * np.exp(-1j * np.array([1.0, 2.0])[None, :] * traj.times[:, None])
    assert np.max(np.abs(traj.states - exact)) <= 1e-9


def test_oscillator_energy_conserved():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    omega = a + a.conj().T
    f = np.zeros(2)
    field = oscillator_field(omega, f)
    z0 = np.array([0.4 - 0.1j, 0.2 + 0.3j])
    traj = integrate(field, z0, 5.0, IntegratorControls(rtol=1e-11))
    energies = [oscillator_energy(omega, f, s) for s in traj.states]
    assert max(energies) - min(energies) <= 1e-9


def test_oscillator_rejects_nonhermitian():
    with pytest.raises(NonHermitianOmega):
        oscillator_field(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros(2))


def test_rk4_convergence_order():
    eps = LinearHamiltonian({"J0": 0.9, "J+": 0.35 + 0.2j, "J-": 0.35 - 0.2j})
    field = assemble_rhs(su2, eps)
    z0 = [0.3 + 0.4j]
    ref = integrate(field, z0, 2.0, IntegratorControls(rtol=1e-13, n_samples=11))
    errs = []
    for dt in (0.05, 0.025):
        t = integrate(field, z0, 2.0, IntegratorControls(method="rk4", dt=dt, n_samples=11))
        errs.append(np.max(np.abs(t.states - ref.states)))
    ratio = errs[0] / errs[1]
    assert 11.0 <= ratio <= 22.0


def test_blow_up_detected():
    z = MultiPoly.var("z")
    # dz/dt = z^2 from z0 = 1 blows up at t = 1
    field = FlowField(["z"], {"z": 1j * z * z})
    traj = integrate(field, [1.0], 2.0, IntegratorControls(n_samples=101, blowup_threshold=1e6))
    assert traj.status in ("blow_up", "step_failure")
    assert traj.t_fail is not None and traj.t_fail <= 1.1
    assert len(traj.times) < 101


# -- matrix Riccati ----------------------------------------------------------


def _dyadic_hermitian(rng, n, scale=0.5):
    re = rng.integers(-3, 4, size=(n, n)) * 0.25
    im = rng.integers(-3, 4, size=(n, n)) * 0.25
    a = re + 1j * im
    return (a + a.conj().T) * scale


def test_riccati_scalar_reduces_to_su2_forms():
    # m = n = 1: the compact variant is the spin flow, the non-compact one
    # flips the sign of the quadratic term
    eps01 = np.array([[0.5]])
    eps02 = np.array([[-0.25]])
    epsp = np.array([[0.25 + 0.5j]])
    epsm = epsp.conj().T
    z = MultiPoly.var("Z11")
    compact = matrix_riccati_field(eps01, eps02, epsp, epsm, "compact")
    noncompact = matrix_riccati_field(eps01, eps02, epsp, epsm, "noncompact")
    eps0 = 0.75  # eps01 - eps02
    want_c = MultiPoly.const(0.25 + 0.5j) + eps0 * z - (0.25 - 0.5j) * z ** 2
    want_n = MultiPoly.const(0.25 + 0.5j) + eps0 * z + (0.25 - 0.5j) * z ** 2
    assert compact.rhs_poly("Z11") == want_c
    assert noncompact.rhs_poly("Z11") == want_n
    diff = compact.rhs_poly("Z11") - noncompact.rhs_poly("Z11")
    assert diff == -2 * (0.25 - 0.5j) * z ** 2


def test_riccati_matches_projective_plane_restriction():
    # dyadic entries keep float arithmetic exact, so the comparison is literal
    rng = np.random.default_rng(3)
    eps3 = _dyadic_hermitian(rng, 3, scale=1.0)
    ham = LinearHamiltonian.from_matrix(eps3)
    flag_field = assemble_rhs(su3, ham)
    blocks = cp2_riccati_blocks(eps3)
    riccati = matrix_riccati_field(*blocks[:4], variant=blocks[4])
    rename = {"z12": "Z11", "z13": "Z12"}
    for src, dst in rename.items():
        got = riccati.rhs_poly(dst)
        want = flag_field.rhs_poly(src).substitute_zero("z23").rename(rename)
        assert got == want


def test_riccati_sylvester_flow_when_off_blocks_vanish():
    eps01 = np.diag([1.0, -0.5]).astype(complex)
    eps02 = np.diag([0.25]).astype(complex)
    field = matrix_riccati_field(eps01, eps02, np.zeros((2, 1)), np.zeros((1, 2)), "compact")
    for v in field.variables:
        assert field.rhs_poly(v).degree() <= 1


def test_riccati_rejects_bad_blocks():
    with pytest.raises(NonHermitianBlocks):
        matrix_riccati_field(
            np.array([[1j]]), np.array([[0.0]]), np.array([[1.0]]), np.array([[1.0]])
        )
    with pytest.raises(NonHermitianBlocks):
        matrix_riccati_field(
            np.array([[0.0]]), np.array([[0.0]]), np.array([[1.0]]), np.array([[2.0]])
        )
    with pytest.raises(DimensionMismatch):
        matrix_riccati_field(
            np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((1, 2)), np.zeros((2, 2))
        )


def test_linearize_block_diagonal_exponential():
    rng = np.random.default_rng(5)
    eps01 = _dyadic_hermitian(rng, 2)
    eps02 = _dyadic_hermitian(rng, 2)
    z0 = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * 0.3
    lin = riccati_linearize(
        eps01, eps02, np.zeros((2, 2)), np.zeros((2, 2)), "compact", z0, np.eye(2), 4.0, 41
    )
    from scipy.linalg import expm

    for k, t in enumerate(lin.times):
        want = expm(-1j * eps01 * t) @ z0 @ expm(1j * eps02 * t)
        assert np.max(np.abs(lin.z[k] - want)) <= 1e-9


def test_linearize_t0_identity():
    z0 = np.array([[0.3 - 0.2j]])
    lin = riccati_linearize(
        np.array([[0.5]]), np.array([[0.1]]), np.array([[0.2]]), np.array([[0.2]]),
        "compact", z0, np.array([[2.0]]), 1.0, 5,
    )
    assert np.allclose(lin.z[0], z0 @ np.linalg.inv(np.array([[2.0]])))


def test_linearize_cross_check_direct_integration():
    rng = np.random.default_rng(11)
    for variant in ("compact", "noncompact"):
        m, n = 2, 2
        eps01 = _dyadic_hermitian(rng, m)
        eps02 = _dyadic_hermitian(rng, n)
        epsp = (rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))) * 0.3
        epsm = epsp.conj().T
        field = matrix_riccati_field(eps01, eps02, epsp, epsm, variant)
        z0 = (rng.normal(size=m * n) + 1j * rng.normal(size=m * n)) * 0.2
        traj = integrate(field, z0, 5.0, IntegratorControls(n_samples=51, rtol=1e-10))
        assert traj.status == "completed"
        lin = riccati_linearize(eps01, eps02, epsp, epsm, variant,
                                z0.reshape(m, n), np.eye(n), 5.0, 51)
        for k in range(51):
            if k in lin.flagged:
                continue
            assert np.max(np.abs(traj.states[k].reshape(m, n) - lin.z[k])) <= 1e-6


# -- quadrature and exports --------------------------------------------------


def test_cumulative_simpson_polynomial_exact():
    x = np.linspace(0.0, 2.0, 21)
    y = 3 * x ** 2
    out = cumulative_simpson(y, x[1] - x[0])
    assert np.max(np.abs(out - x ** 3)) <= 1e-12


def test_trajectory_csv_and_json(tmp_path):
    field = assemble_rhs(su2, LinearHamiltonian({"J0": 1.0}))
    traj = integrate(field, [0.5], 1.0, IntegratorControls(n_samples=11))
    csv_path = tmp_path / "traj.csv"
    traj.to_csv(str(csv_path))
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "t,Re_z,Im_z"
    assert len(lines) == 12
    doc = traj.to_json(str(tmp_path / "traj.json"))
    assert doc["status"] == "completed"
    # determinism: a rerun produces byte-identical output
    traj2 = integrate(field, [0.5], 1.0, IntegratorControls(n_samples=11))
    csv2 = tmp_path / "traj2.csv"
    traj2.to_csv(str(csv2))
    assert csv2.read_text() == csv_path.read_text()
