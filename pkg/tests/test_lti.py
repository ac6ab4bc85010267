import numpy as np
import pytest

from ddaekit.errors import ShapeError, SingularPencil
from ddaekit.forcing import SymbolicSignal
from ddaekit.lti import (LinearDdae, LtiDescriptor, algebraic_solution,
                         classify_linear, couple, hybrid_shifted,
                         is_consistent, regularity_theorem_check,
                         sf_model_from_linear)
from ddaekit.pencil import WeierstrassForm, is_regular, weierstrass
from ddaekit.sfdae import Classification, classify
from ddaekit import models

from conftest import well_conditioned


def scalar_integrator():
    """z' = u with unit output."""
    return LtiDescriptor(np.eye(1), np.zeros((1, 1)), np.eye(1), np.eye(1))


def random_subsystem(rng, n, m, p, singular=False):
    E = rng.standard_normal((n, n))
    A = rng.standard_normal((n, n))
    if rng.random() < 0.5:
        E[rng.integers(n)] = 0.0     # descriptor-style rank deficiency
    if singular:
        row = rng.integers(n)
        E[row] = 0.0
        A[row] = 0.0
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    return LtiDescriptor(E, A, B, C)


# -- couple -------------------------------------------------------------------

def test_couple_two_scalar_integrators():
    c = couple(scalar_integrator(), scalar_integrator())
    assert np.array_equal(c.E, np.eye(2))
    assert np.array_equal(c.A, np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert c.m == 0 and c.p == 0


def test_couple_reproduces_coupled_index_example(rng):
    vals = dict(a1=0.3, a2=-1.2, b11=0.5, b12=-0.7, c11=1.1, c12=0.9,
                b21=0.2, b22=-0.4, c21=0.6, c22=-1.5)
    s1, s2 = models.ex_coupled_subsystems(**vals)
    c = couple(s1, s2)
    expected_A = np.array([
        [vals["a1"], 0.0, vals["b11"], vals["b12"]],
        [0.0, 1.0, vals["c11"], vals["c12"]],
        [vals["b21"], vals["b22"], vals["a2"], 0.0],
        [vals["c21"], vals["c22"], 0.0, 1.0],
    ])
    assert np.allclose(c.E, np.diag([1.0, 0.0, 1.0, 0.0]))
    assert np.allclose(c.A, expected_A)


def test_couple_reproduces_split_example():
    for c_val in (-1.0, 0.0, 0.7, 2.0):
        s1 = models.ex_split_subsystem1(c_val)
        s2 = models.ex_split_subsystem2()
        full = couple(s1, s2)
        ref = models.ex_split_full(c_val)
        assert np.allclose(full.E, ref.E)
        assert np.allclose(full.A, ref.A)


def test_couple_dimension_mismatch():
    s1 = scalar_integrator()
    s2 = LtiDescriptor(np.eye(2), np.zeros((2, 2)), np.ones((2, 2)),
                       np.ones((2, 2)))
    with pytest.raises(ShapeError):
        couple(s1, s2)


# -- hybrid_shifted -----------------------------------------------------------

def test_hybrid_shifted_blocks_and_tau0_substitution(rng):
    s1 = random_subsystem(rng, 3, 2, 1)
    s2 = random_subsystem(rng, 2, 1, 2)
    hd = hybrid_shifted(s1, s2, 0.25)
    cp = couple(s1, s2)
    assert np.array_equal(hd.E, cp.E)
    # moving the delayed block to current time recovers the coupled matrix
    assert np.array_equal(hd.A0 + hd.A1, cp.A)
    assert np.all(hd.A1[:, :s1.n] == 0.0) and np.all(hd.A1[s1.n:] == 0.0)


def test_hybrid_shifted_reproduces_shifted_index_example():
    s1, s2 = models.ex_shifted_subsystems(a=0.3, b=-1.0, c=2.0, d=0.5)
    hd = hybrid_shifted(s1, s2, 1.0)
    N2 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(hd.E, np.block(
        [[N2, np.zeros((2, 2))], [np.zeros((2, 2)), N2]]))
    assert np.allclose(hd.A0, np.block(
        [[np.eye(2), np.zeros((2, 2))],
         [np.array([[0.3, -1.0], [2.0, 0.5]]), np.eye(2)]]))


def test_hybrid_determinant_factorizes(rng):
    # block lower triangular: det(sE - A0) = det(sE1 - A1) det(sE2 - A2)
    for _ in range(200):
        n1, n2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        m = int(rng.integers(1, 3))
        p = int(rng.integers(1, 3))
        s1 = random_subsystem(rng, n1, m, p)
        s2 = random_subsystem(rng, n2, p, m)
        hd = hybrid_shifted(s1, s2, 1.0)
        for s in (0.3 + 1.1j, -0.8 + 0.2j, 2.0 + 0.0j):
            lhs = np.linalg.det(s * hd.E - hd.A0)
            rhs = (np.linalg.det(s * s1.E - s1.A)
                   * np.linalg.det(s * s2.E - s2.A))
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs), abs(rhs))


def test_zero_coupling_decouples(rng):
    s1 = random_subsystem(rng, 2, 1, 1)
    s1.B[:] = 0.0
    s2 = random_subsystem(rng, 2, 1, 1)
    hd = hybrid_shifted(s1, s2, 1.0)
    assert np.all(hd.A1 == 0.0)


# -- algebraic solution and consistency --------------------------------------

def _form_with_N(N):
    a = N.shape[0]
    return WeierstrassForm(np.eye(a), np.eye(a), np.zeros((0, 0)), N,
                           0, a, 2 if np.any(N) else 1, 0.0, 0.0, 1.0, 1.0)


def test_algebraic_solution_nilpotent_chain():
    # N = [[0,1],[0,0]], Ba = I, fa = 0, u = (t^2, t) -> -(t^2 + 1, t)
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    w = _form_with_N(N)
    u = SymbolicSignal(poly=[[0.0, 0.0, 1.0], [0.0, 1.0]])
    fa = SymbolicSignal.zero(2)
    for t in (0.0, 0.5, -1.2):
        got = algebraic_solution(w, np.eye(2), u, fa, t)
        assert got == pytest.approx([-(t**2 + 1.0), -t])


def test_algebraic_solution_index_one_and_constant_input():
    w = _form_with_N(np.zeros((2, 2)))
    u = SymbolicSignal(poly=[[1.0, 3.0], [2.0]])
    fa = SymbolicSignal(poly=[[0.5], [0.0, 1.0]])
    t = 0.8
    assert algebraic_solution(w, np.eye(2), u, fa, t) == pytest.approx(
        -(u.eval(t) + fa.eval(t)))

    # nu = 2 with constant input: derivative terms vanish, N plays no role
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    w = _form_with_N(N)
    u = SymbolicSignal.constant([2.0, -1.0])
    got = algebraic_solution(w, np.eye(2), u, SymbolicSignal.zero(2), 3.3)
    assert got == pytest.approx([-2.0, 1.0])


def test_algebraic_solution_satisfies_recursion(rng):
    # N zdot_a - z_a - Ba u - fa = 0 for polynomial forcing up to degree 3
    N = np.array([[0.0, 2.0, -1.0], [0.0, 0.0, 0.5], [0.0, 0.0, 0.0]])
    w = WeierstrassForm(np.eye(3), np.eye(3), np.zeros((0, 0)), N, 0, 3, 3,
                        0.0, 0.0, 1.0, 1.0)
    Ba = rng.standard_normal((3, 2))
    u = SymbolicSignal(poly=rng.standard_normal((2, 4)).tolist())
    fa = SymbolicSignal(poly=rng.standard_normal((3, 4)).tolist())

    def za(t, order=0):
        acc = np.zeros(3)
        Npow = np.eye(3)
        for j in range(w.nu):
            acc += Npow @ (Ba @ u.eval(t, j + order) + fa.eval(t, j + order))
            Npow = N @ Npow
        return -acc

    for t in rng.uniform(-1, 1, 6):
        res = N @ za(t, 1) - za(t) - Ba @ u.eval(t) - fa.eval(t)
        assert np.abs(res).max() < 1e-10


def test_is_consistent_ode_and_scalar_algebraic(rng):
    ode = LtiDescriptor(np.eye(2), rng.standard_normal((2, 2)),
                        np.zeros((2, 1)), np.zeros((1, 2)))
    u = SymbolicSignal.zero(1)
    assert is_consistent(ode, rng.standard_normal(2), u, 0.0)

    # 0 = z + u  ->  consistent iff z0 = -u(t0)
    alg = LtiDescriptor(np.zeros((1, 1)), np.array([[1.0]]), np.array([[1.0]]),
                        np.zeros((0, 1)))
    u = SymbolicSignal(poly=[[0.7, 2.0]])
    t0 = 0.4
    assert is_consistent(alg, [-u.eval(t0)[0]], u, t0)
    assert not is_consistent(alg, [-u.eval(t0)[0] + 1.0], u, t0)


# -- classification -----------------------------------------------------------

def test_classify_advanced_example():
    d = models.ex_advanced_linear(1.0)
    assert classify_linear(d) == Classification.advanced(2)


def test_classify_shift_example_retarded():
    d = models.ex_shift_linear(0.5)
    assert classify_linear(d) == Classification.retarded()


def test_classify_no_delay_retarded(rng):
    E = np.eye(2)
    A0 = rng.standard_normal((2, 2))
    d = LinearDdae(E, A0, np.zeros((2, 2)), 1.0)
    assert classify_linear(d) == Classification.retarded()


def test_classify_neutral_example():
    # x' = x, 0 = -y + x(t - tau): algebraic row sees the delayed state
    E = np.diag([1.0, 0.0])
    A0 = np.array([[1.0, 0.0], [0.0, -1.0]])
    A1 = np.array([[0.0, 0.0], [1.0, 0.0]])
    d = LinearDdae(E, A0, A1, 1.0)
    assert classify_linear(d) == Classification.neutral()


def test_classification_equivalence_invariant(rng):
    d0 = models.ex_advanced_linear(1.0)
    base = classify_linear(d0)
    for _ in range(50):
        S = well_conditioned(rng, 2)
        T = well_conditioned(rng, 2)
        d = LinearDdae(S @ d0.E @ T, S @ d0.A0 @ T, S @ d0.A1 @ T, 1.0)
        assert classify_linear(d) == base


def test_classify_singular_current_pencil_raises():
    E = np.diag([1.0, 0.0])
    A0 = np.zeros((2, 2))
    A1 = np.array([[0.0, 1.0], [0.0, 1.0]])
    with pytest.raises(SingularPencil):
        classify_linear(LinearDdae(E, A0, A1, 1.0))


# -- regularity lemma harness -------------------------------------------------

def test_regularity_check_regular_and_singular(rng):
    for _ in range(25):
        s1 = random_subsystem(rng, 2, 1, 1)
        s2 = random_subsystem(rng, 2, 1, 1)
        assert regularity_theorem_check(s1, s2)
    # singular first block (split example with c = 0)
    s1 = models.ex_split_subsystem1(0.0)
    s2 = models.ex_split_subsystem2()
    assert not is_regular(s1.pencil)
    assert regularity_theorem_check(s1, s2)
    # identity subsystems
    one = scalar_integrator()
    assert regularity_theorem_check(one, one)


# -- linear wrap --------------------------------------------------------------

def neutral_linear(tau=1.0):
    E = np.diag([1.0, 0.0])
    A0 = np.array([[1.0, 0.0], [0.0, -1.0]])
    A1 = np.array([[0.0, 0.0], [1.0, 0.0]])
    return LinearDdae(E, A0, A1, tau)


def test_wrapped_classification_matches_linear():
    for build in (models.ex_advanced_linear, models.ex_shift_linear,
                  neutral_linear):
        d = build(0.5)
        wrapped = sf_model_from_linear(d)
        assert classify(wrapped) == classify_linear(d)


def test_wrapped_split_counts():
    d = models.ex_shift_linear(0.5)
    wrapped = sf_model_from_linear(d)
    w = weierstrass(d.pencil)
    assert (wrapped.d, wrapped.a) == (w.d, w.a)


def test_json_roundtrips(rng):
    s = random_subsystem(rng, 2, 1, 1)
    s2 = LtiDescriptor.from_json(s.to_json())
    assert np.allclose(s.E, s2.E) and np.allclose(s.B, s2.B)
    d = models.ex_advanced_linear(1.0)
    d2 = LinearDdae.from_json(d.to_json())
    assert np.allclose(d.A1, d2.A1) and d.tau == d2.tau
