from fractions import Fraction as Q
from math import comb

import numpy as np
import pytest

from csflow.dynamics import (
    IntegratorControls,
    LinearHamiltonian,
    assemble_rhs,
    integrate,
    phase_along,
)
from csflow.quantum import (
    CoherentContext,
    InvalidSpin,
    KernelSpec,
    OutOfChart,
    SingularMetric,
    coherence_fidelity,
    coherent_vector,
    energy_function,
    kahler_metric,
    kernel_eval,
    matched_hamiltonian,
    poisson_flow,
    rep_kernel,
    schrodinger_propagate,
    su2_rep,
    su3_rep,
    su3_weights,
    symbol_energy,
)
from csflow.symalg import DiffOp, MultiPoly, ONE
from csflow.synth import Representation, golden_tables, su_flag_representation

rng = np.random.default_rng(20240810)

su2_table = golden_tables()["su2"]
su3_table = golden_tables()["su3"]


def random_hermitian(n, scale=0.6):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def su2_ham(e0, ep):
    return LinearHamiltonian({"J0": e0, "J+": ep, "J-": np.conj(ep)})


def su2_field(e0, ep):
    return assemble_rhs(su2_table, su2_ham(e0, ep))


def su3_field(eps3):
    ham = LinearHamiltonian.from_matrix(eps3)
    return assemble_rhs(su3_table, matched_hamiltonian(su3_table, ham))


# -- representations ---------------------------------------------------------


def test_su2_rep_basics():
    rep = su2_rep(Q(1, 2))
    assert rep.dim == 2
    j0 = np.diag(rep.generators["J0"]).real
    assert sorted(j0) == [-0.5, 0.5]
    e0 = rep.extreme_vector
    assert np.allclose(rep.generators["J-"] @ e0, 0)
    assert np.linalg.norm(rep.generators["J+"] @ e0) > 0
    assert np.allclose(rep.generators["J0"] @ e0, -0.5 * e0)


def test_su2_rep_commutation_residual():
    from csflow.synth import su2_bracket

    for j in (Q(1, 2), 1, Q(5, 2), 5, 10):
        rep = su2_rep(j)
        assert rep.commutation_residual(su2_bracket) <= 1e-13


def test_invalid_spin():
    with pytest.raises(InvalidSpin):
        su2_rep(0.3)
    with pytest.raises(InvalidSpin):
        su2_rep(-1)


def test_su3_rep_commutation_and_weights():
    from csflow.synth import gl_bracket

    for kind, weights in (("fundamental", (1, 0, 0)), ("wedge", (1, 1, 0))):
        rep = su3_rep(kind)
        assert rep.commutation_residual(gl_bracket) <= 1e-13
        e0 = rep.extreme_vector
        for i, w in enumerate(weights):
            assert np.allclose(rep.generators[f"C{i + 1}{i + 1}"] @ e0, w * e0)
        # raising operators annihilate the extreme vector
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                if i < j:
                    assert np.allclose(rep.generators[f"C{i}{j}"] @ e0, 0)


# -- coherent vectors and kernels --------------------------------------------


def test_coherent_vector_at_origin():
    for rep in (su2_rep(2), su3_rep("fundamental"), su3_rep("wedge")):
        v = coherent_vector(rep, np.zeros(len(rep.zvars)))
        assert np.allclose(v, rep.extreme_vector)


def test_su2_norm_binomial_oracle():
    # independent oracle: expand exp(z J+) e0 in the spin basis by hand
    for j in (Q(1, 2), 1, Q(5, 2)):
        rep = su2_rep(j)
        two_j = int(2 * j)
        for _ in range(5):
            z = complex(rng.normal(), rng.normal()) * 0.6
            v = coherent_vector(rep, [z])
            want = sum(comb(two_j, m) * abs(z) ** (2 * m) for m in range(two_j + 1))
            assert abs(np.vdot(v, v).real - want) <= 1e-12 * max(1.0, want)


def test_su3_norms_reproduce_kernel_factors():
    fund = su3_rep("fundamental")
    wedge = su3_rep("wedge")
    for _ in range(50):
        z = rng.normal(size=3) * 0.8 + 1j * rng.normal(size=3) * 0.8
        z12, z13, z23 = z
        d1 = 1 + abs(z12) ** 2 + abs(z13) ** 2
        d2 = d1 * (1 + abs(z23) ** 2) - abs(z12 + z13 * np.conj(z23)) ** 2
        vf = coherent_vector(fund, z)
        vw = coherent_vector(wedge, z)
        assert abs(np.vdot(vf, vf).real - d1) <= 1e-12 * d1
        assert abs(np.vdot(vw, vw).real - d2) <= 1e-12 * max(1.0, d2)


def test_parametrization_identity_vector_level():
    # single-exponential coordinates match matrix-entry coordinates after the
    # triangular substitution in the middle coordinate
    for kind in ("fundamental", "wedge"):
        rep = su3_rep(kind)
        for _ in range(10):
            zeta = rng.normal(size=3) * 0.7 + 1j * rng.normal(size=3) * 0.7
            z = zeta.copy()
            z[1] = zeta[1] + 0.5 * zeta[0] * zeta[2]
            va = coherent_vector(rep, zeta, chart="canonical")
            vb = coherent_vector(rep, z, chart="matrix")
            assert np.max(np.abs(va - vb)) <= 1e-12


def test_kernel_normalization():
    assert kernel_eval(KernelSpec.su2(2), [0.0]) == 1.0
    assert kernel_eval(KernelSpec.su11(0.75), [0.0]) == 1.0
    assert kernel_eval(KernelSpec.grassmann(2, 2), np.zeros(4)) == 1.0
    assert kernel_eval(KernelSpec.su3(2, 3), np.zeros(3)) == 1.0


def test_kernel_matches_rep_inner_products():
    rep = su2_rep(Q(5, 2))
    spec = KernelSpec.su2(Q(5, 2))
    for _ in range(10):
        z = complex(rng.normal(), rng.normal()) * 0.5
        w = complex(rng.normal(), rng.normal()) * 0.5
        assert abs(kernel_eval(spec, [z], [w]) - rep_kernel(rep, [z], [w])) <= 1e-12


def test_su3_kernel_polarized_matches_reps():
    for kind, spec in (("fundamental", KernelSpec.su3(1, 0)), ("wedge", KernelSpec.su3(0, 1))):
        rep = su3_rep(kind)
        for _ in range(10):
            z = rng.normal(size=3) * 0.6 + 1j * rng.normal(size=3) * 0.6
            w = rng.normal(size=3) * 0.6 + 1j * rng.normal(size=3) * 0.6
            assert abs(kernel_eval(spec, z, w) - rep_kernel(rep, z, w)) <= 1e-12


def test_grassmann_rank_one_matches_projective_kernel():
    spec_g = KernelSpec.grassmann(1, 2)
    spec_s = KernelSpec.su3(1, 0)
    for _ in range(10):
        z = rng.normal(size=3) * 0.7 + 1j * rng.normal(size=3) * 0.7
        z[2] = 0.0
        assert abs(kernel_eval(spec_g, z[:2]) - kernel_eval(spec_s, z)) <= 1e-12


def test_su11_chart_boundary():
    with pytest.raises(OutOfChart):
        kernel_eval(KernelSpec.su11(1), [1.2])
    val = kernel_eval(KernelSpec.su11(1), [0.5])
    assert val.real > 1.0


# -- energy ------------------------------------------------------------------


def test_energy_extreme_vector():
    rep = su2_rep(2)
    assert energy_function(rep, su2_ham(1.0, 0), [0.0]) == pytest.approx(-2.0)
    fund = su3_rep("fundamental")
    ham = LinearHamiltonian({"C11": 0.7, "C22": -0.2, "C33": 0.1})
    assert energy_function(fund, ham, np.zeros(3)) == pytest.approx(0.7)


def test_su2_energy_closed_form():
    for j in (Q(1, 2), 3):
        rep = su2_rep(j)
        for _ in range(5):
            z = complex(rng.normal(), rng.normal()) * 0.8
            got = energy_function(rep, su2_ham(1.0, 0), [z])
            want = float(j) * (abs(z) ** 2 - 1) / (1 + abs(z) ** 2)
            assert abs(got - want) <= 1e-12


def test_symbol_energy_matches_matrix_energy():
    ham = LinearHamiltonian.from_matrix(random_hermitian(3))
    for kind, jw in (("fundamental", (1, 0)), ("wedge", (0, 1))):
        rep = su3_rep(kind)
        table = su_flag_representation(3, weights=list(su3_weights(*jw)))
        spec = KernelSpec.su3(*jw)
        for _ in range(5):
            z = rng.normal(size=3) * 0.5 + 1j * rng.normal(size=3) * 0.5
            got = symbol_energy(spec, table, ham.conjugated(), z)
            want = energy_function(rep, ham, z)
            assert abs(got - want) <= 1e-8


# -- metric ------------------------------------------------------------------


def test_su2_metric_origin_and_closed_form():
    for j in (Q(1, 2), 2):
        rep = su2_rep(j)
        g0 = kahler_metric(rep, [0.0])
        assert abs(g0[0, 0] - 2 * float(j)) <= 1e-7
        for _ in range(4):
            z = complex(rng.normal(), rng.normal()) * 0.7
            g = kahler_metric(rep, [z])
            want = 2 * float(j) / (1 + abs(z) ** 2) ** 2
            assert abs(g[0, 0] - want) <= 1e-7


def test_metric_hermitian():
    spec = KernelSpec.su3(1, 1)
    z = rng.normal(size=3) * 0.5 + 1j * rng.normal(size=3) * 0.5
    g = kahler_metric(spec, z)
    assert np.linalg.norm(g - g.conj().T) <= 1e-9


def test_fund_metric_degenerate_direction():
    rep = su3_rep("fundamental")
    z = rng.normal(size=3) * 0.4 + 1j * rng.normal(size=3) * 0.4
    with pytest.raises(SingularMetric):
        kahler_metric(rep, z)
    # the projective sub-chart is fine
    g = kahler_metric(rep, z, vars_idx=[0, 1])
    assert np.linalg.eigvalsh(g).min() > 0


def test_su3_full_metric_positive():
    spec = KernelSpec.su3(1, 1)
    for _ in range(5):
        z = rng.normal(size=3) * 0.6 + 1j * rng.normal(size=3) * 0.6
        g = kahler_metric(spec, z)
        assert np.linalg.eigvalsh(g).min() > 0


# -- Poisson flow vs polynomial right-hand side -------------------------------


def test_poisson_matches_field_su2():
    for j in (Q(1, 2), 1, Q(5, 2), 5):
        rep = su2_rep(j)
        e0, ep = 0.6, 0.2 - 0.35j
        field = su2_field(e0, ep)
        for _ in range(4):
            z = np.array([complex(rng.normal(), rng.normal()) * 0.6])
            v = poisson_flow(rep, su2_ham(e0, ep), z)
            assert np.max(np.abs(v - field.velocity(z))) <= 1e-6


def test_poisson_zero_hamiltonian():
    rep = su2_rep(1)
    v = poisson_flow(rep, LinearHamiltonian({}), np.array([0.3 + 0.2j]))
    assert np.max(np.abs(v)) <= 1e-9


def test_poisson_matches_field_su3_fundamental_subchart():
    eps3 = random_hermitian(3)
    field = su3_field(eps3)
    rep = su3_rep("fundamental")
    ham = LinearHamiltonian.from_matrix(eps3)
    for _ in range(5):
        z = rng.normal(size=3) * 0.5 + 1j * rng.normal(size=3) * 0.5
        v = poisson_flow(rep, ham, z, vars_idx=[0, 1])
        assert np.max(np.abs(v - field.velocity(z)[:2])) <= 1e-5


def test_poisson_matches_field_su3_generic_weight_kernel():
    eps3 = random_hermitian(3)
    field = su3_field(eps3)
    ham = LinearHamiltonian.from_matrix(eps3)
    spec = KernelSpec.su3(1, 1)
    table = su_flag_representation(3, weights=list(su3_weights(1, 1)))
    for _ in range(5):
        z = rng.normal(size=3) * 0.5 + 1j * rng.normal(size=3) * 0.5
        v = poisson_flow(spec, ham, z, diff_rep=table)
        assert np.max(np.abs(v - field.velocity(z))) <= 1e-5


def test_poisson_noncompact_disc():
    # kernel-only su(1,1) oracle: the flow has the opposite quadratic sign
    k = 0.8
    z = MultiPoly.var("z")
    table = Representation(
        name="su11",
        ops={
            "K0": DiffOp(MultiPoly.const(Q(4, 5)), {"z": z}),
            "K+": DiffOp(0, {"z": ONE}),
            "K-": DiffOp(2 * Q(4, 5) * z, {"z": z * z}),
        },
        zvars=["z"],
        convention="direct",
        adjoint={"K0": "K0", "K+": "K-", "K-": "K+"},
        bracket_fn=lambda x, y: {},
    )
    ham = LinearHamiltonian({"K0": 0.5, "K+": 0.1 + 0.2j, "K-": 0.1 - 0.2j})
    field = assemble_rhs(table, ham)
    zq = MultiPoly.var("z")
    want = (
        MultiPoly.const(0.1 + 0.2j) + 0.5 * zq + (0.1 - 0.2j) * zq ** 2
    )
    assert field.rhs_poly("z") == want
    for _ in range(4):
        pt = np.array([complex(rng.normal(), rng.normal()) * 0.35])
        v = poisson_flow(KernelSpec.su11(k), ham, pt, diff_rep=table)
        assert np.max(np.abs(v - field.velocity(pt))) <= 1e-6


# -- Schrödinger propagation and coherence ------------------------------------


def test_propagation_identity_and_eigenphase():
    rep = su2_rep(1)
    psi0 = coherent_vector(rep, [0.4 + 0.1j])
    assert np.allclose(schrodinger_propagate(rep, su2_ham(0.7, 0.2 + 0.1j), psi0, 0.0), psi0)
    # extreme vector is an eigenvector of J0
    e0 = rep.extreme_vector
    psi = schrodinger_propagate(rep, su2_ham(1.0, 0.0), e0, 2.0)
    assert np.allclose(psi, np.exp(1j * 1.0 * 2.0) * e0)


def test_propagation_unitary():
    rep = su3_rep("wedge")
    ham = LinearHamiltonian.from_matrix(random_hermitian(3))
    psi0 = coherent_vector(rep, [0.2, -0.1j, 0.4])
    psi = schrodinger_propagate(rep, ham, psi0, 3.3)
    assert abs(np.linalg.norm(psi) - np.linalg.norm(psi0)) <= 1e-12


def test_coherence_preserved_su2():
    rep = su2_rep(Q(5, 2))
    e0, ep = 0.45, 0.3 + 0.2j
    field = su2_field(e0, ep)
    traj = integrate(field, [0.25 - 0.15j], 5.0, IntegratorControls(n_samples=101))
    assert traj.status == "completed"
    hm = rep.matrix_of(su2_ham(e0, ep))
    psi0 = coherent_vector(rep, traj.states[0])
    psi0 /= np.linalg.norm(psi0)
    for k in range(0, 101, 10):
        psi = schrodinger_propagate(rep, hm, psi0, traj.times[k])
        assert coherence_fidelity(rep, psi, traj.states[k]) >= 1 - 1e-10


def test_coherence_preserved_su3_both_kinds():
    eps3 = random_hermitian(3)
    field = su3_field(eps3)
    traj = integrate(field, [0.2 + 0.1j, -0.15j, 0.25], 5.0, IntegratorControls(n_samples=101))
    assert traj.status == "completed"
    for kind in ("fundamental", "wedge"):
        rep = su3_rep(kind)
        hm = rep.matrix_of(LinearHamiltonian.from_matrix(eps3))
        psi0 = coherent_vector(rep, traj.states[0])
        psi0 /= np.linalg.norm(psi0)
        for k in range(0, 101, 10):
            psi = schrodinger_propagate(rep, hm, psi0, traj.times[k])
            assert coherence_fidelity(rep, psi, traj.states[k]) >= 1 - 1e-10


def test_phase_stationary_point():
    # with only J0 on, the origin is a fixed point: pure dynamical phase
    rep = su2_rep(1)
    e0 = 0.9
    field = su2_field(e0, 0.0)
    traj = integrate(field, [0.0], 4.0, IntegratorControls(n_samples=81))
    ctx = CoherentContext.build(rep, rep.matrix_of(su2_ham(e0, 0.0)))
    traj = phase_along(traj, ctx, field=field)
    assert traj.phi_total[0] == 0.0
    assert np.max(np.abs(traj.phi_berry)) <= 1e-12
    want = -(-1.0 * e0) * traj.times  # energy at the origin is -j eps0 with j=1
    assert np.max(np.abs(traj.phi_dynamical - want)) <= 1e-9


def test_phase_reconstructs_schrodinger_su2():
    rep = su2_rep(1)
    e0, ep = 0.8, 0.2 + 0.3j
    field = su2_field(e0, ep)
    traj = integrate(field, [0.3 + 0.2j], 5.0, IntegratorControls(n_samples=401))
    ctx = CoherentContext.build(rep, rep.matrix_of(su2_ham(e0, ep)))
    traj = phase_along(traj, ctx, field=field)
    hm = rep.matrix_of(su2_ham(e0, ep))
    psi0 = coherent_vector(rep, traj.states[0])
    psi0 /= np.linalg.norm(psi0)
    worst = 0.0
    for k in range(0, 401, 25):
        psi = schrodinger_propagate(rep, hm, psi0, traj.times[k])
        v = coherent_vector(rep, traj.states[k])
        v /= np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(psi - np.exp(1j * traj.phi_total[k]) * v)))
    assert worst <= 1e-6
    assert abs(traj.phi_berry[-1]) > 1e-3  # geometric part genuinely shows up


def test_matched_hamiltonian_rules():
    ham = LinearHamiltonian({"C12": 1 + 2j, "C21": 1 - 2j})
    sym_rep = su_flag_representation(3)
    out = matched_hamiltonian(sym_rep, ham)
    assert out.eps["C12"] == 1 - 2j
    direct = golden_tables()["su2"]
    ham2 = LinearHamiltonian({"J+": 1j, "J-": -1j})
    assert matched_hamiltonian(direct, ham2) is ham2
