import itertools
import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qwitness import families as fam
from qwitness import sampling as sm
from qwitness import scenario as sc
from qwitness import witnesses as wt
from qwitness.errors import DegenerateDenominator, DegenerateMarginal, DomainError, UnsupportedN

seeds = st.integers(0, 2**32 - 1)


# ---- exact-arithmetic oracle for the closed-form Q expressions -------------------------

_SIG = [sp.Matrix([[0, 1], [1, 0]]), sp.Matrix([[0, -sp.I], [sp.I, 0]]),
        sp.Matrix([[1, 0], [0, -1]])]
_ID = sp.eye(2)


def _sym_dot(v):
    return sum((v[i] * _SIG[i] for i in range(3)), sp.zeros(2))


def _sym_state(a, b, c):
    rho = sp.kronecker_product(_ID, _ID)
    rho += sp.kronecker_product(_sym_dot(a), _ID) + sp.kronecker_product(_ID, _sym_dot(b))
    for i in range(3):
        rho += c[i] * sp.kronecker_product(_SIG[i], _SIG[i])
    return rho / 4


def _sym_q(rho, alice_dirs, bob_dirs):
    """|det D|, D[y, x0] = p(0|x1=0; x0, y) - p(0|x1=1; x0, y), exact."""
    def proj(u, b):
        return (_ID + (-1) ** b * _sym_dot(u)) / 2

    def trace_alice(m):
        return sp.Matrix(2, 2, lambda i, j: m[i, j] + m[i + 2, j + 2])

    d = sp.zeros(2)
    for x0 in (0, 1):
        cond = []
        for x1 in (0, 1):
            sigma = trace_alice(sp.kronecker_product(proj(alice_dirs[x0], x1), _ID) * rho)
            cond.append(sigma / sigma.trace())
        for y in (0, 1):
            e0 = proj(bob_dirs[y], 0)
            d[y, x0] = (cond[0] * e0).trace() - (cond[1] * e0).trace()
    return sp.Abs(sp.simplify(d.det()))


def _sym_constructions(c):
    s2 = sp.sqrt(2)
    x, y = (1, 0, 0), (0, 1, 0)
    diag, anti = (1 / s2, 1 / s2, 0), (1 / s2, -1 / s2, 0)
    n = sp.sqrt(c[0] ** 2 + c[1] ** 2)
    return {
        "aligned": ((x, y), (x, y)),
        "steering-optimal": (((c[0] / n, c[1] / n, 0), (c[0] / n, -c[1] / n, 0)), (diag, anti)),
        "rac-optimal": ((diag, anti), (x, y)),
    }


_CLOSED = {"aligned": wt.closed_form_q_aligned,
           "steering-optimal": wt.closed_form_q_steering_optimal,
           "rac-optimal": wt.closed_form_q_rac_optimal}

_EXACT_POINTS = [
    ((sp.Rational(1, 5), sp.Rational(-1, 10), 0), (sp.Rational(1, 10), sp.Rational(3, 10), 0),
     (sp.Rational(1, 2), sp.Rational(-1, 4), sp.Rational(1, 5))),
    ((sp.Rational(-1, 4), sp.Rational(1, 8), sp.Rational(1, 10)), (0, sp.Rational(1, 5), 0),
     (sp.Rational(-3, 10), sp.Rational(2, 5), sp.Rational(-1, 10))),
    ((sp.Rational(1, 10), sp.Rational(1, 10), 0), (sp.Rational(-1, 5), 0, sp.Rational(1, 10)),
     (sp.Rational(3, 5), sp.Rational(3, 5), sp.Rational(-1, 2))),
]


@pytest.mark.parametrize("construction", sorted(_CLOSED))
@pytest.mark.parametrize("point", range(len(_EXACT_POINTS)))
def test_closed_forms_against_exact_derivation(construction, point):
    a, b, c = _EXACT_POINTS[point]
    alice, bob = _sym_constructions(c)[construction]
    exact = _sym_q(_sym_state(a, b, c), alice, bob)
    as_float = [[float(v) for v in vec] for vec in (a, b, c)]
    assert _CLOSED[construction](*as_float) == pytest.approx(float(exact), abs=1e-13)


def test_closed_forms_ignore_third_components():
    a, b, c = (0.2, -0.1, 0.0), (0.1, 0.3, 0.0), (0.5, -0.25, 0.0)
    a3, b3, c3 = (0.2, -0.1, 0.3), (0.1, 0.3, -0.2), (0.5, -0.25, 0.4)
    for f in _CLOSED.values():
        assert f(a, b, c) == f(a3, b3, c3)


def test_closed_form_degeneracies():
    with pytest.raises(DegenerateMarginal):
        wt.closed_form_q_aligned((1, 0, 0), (0, 0, 0), (0, 0, 0))
    with pytest.raises(DegenerateDenominator):
        wt.closed_form_q_steering_optimal((0, 0, 0), (0, 0, 0), (0, 0, 0))


def test_closed_forms_on_werner_like_state():
    # a = b = 0, c = (-V, -V, -V): every construction gives |c1 c2| = V^2
    v = 0.6
    c = (-v, -v, -v)
    assert wt.closed_form_q_aligned((0, 0, 0), (0, 0, 0), c) == pytest.approx(v ** 2)
    assert wt.closed_form_q_steering_optimal((0, 0, 0), (0, 0, 0), c) == pytest.approx(v ** 2)
    assert wt.closed_form_q_rac_optimal((0, 0, 0), (0, 0, 0), c) == pytest.approx(v ** 2)


# ---- guessing bound against an arbitrary-precision evaluation ----------------------------

def _mp_f(q):
    with mpmath.workdps(50):
        q = mpmath.mpf(q)
        return (1 + mpmath.sqrt((2 - q) / 2)) / 2


@pytest.mark.parametrize("q", [0.0, 0.25, 0.49, 1.0, 1.5, 1.999, 2.0])
def test_guessing_bound_high_precision(q):
    f = _mp_f(q)
    assert wt.guessing_bound(q) == pytest.approx(float(f), abs=1e-15)
    with mpmath.workdps(50):
        h = -mpmath.log(f, 2)
    assert wt.min_entropy(q) == pytest.approx(float(h), abs=1e-15)


def test_min_entropy_at_q_one():
    assert wt.min_entropy(1.0) == pytest.approx(0.2284467, abs=5e-8)


def test_guessing_bound_domain():
    with pytest.raises(DomainError):
        wt.guessing_bound(-0.1)
    with pytest.raises(DomainError):
        wt.guessing_bound(2.5)
    assert math.copysign(1.0, wt.min_entropy(0.0)) == 1.0


# ---- classical bit strategies, enumerated exhaustively -----------------------------------

def _classical_tables():
    """Every deterministic one-bit encoding of (x0, x1) with every decoding per y."""
    for enc in itertools.product((0, 1), repeat=4):
        for dec in itertools.product((0, 1), repeat=4):
            p = np.zeros((2, 2, 2, 2))
            for k, (x0, x1) in enumerate(itertools.product((0, 1), (0, 1))):
                m = enc[k]
                for y in (0, 1):
                    p[x0, x1, y, dec[2 * y + m]] = 1
            yield sc.SequentialTable(p)


def test_classical_enumeration_bounds():
    tables = list(_classical_tables())
    assert len(tables) == 256
    wl = [wt.linear_witness_wl(t).value for t in tables]
    pb = [wt.rac_average_success(t).value for t in tables]
    assert max(wl) == 2.0
    assert max(pb) == 0.75
    assert min(wl) == -2.0


def test_rac_optimal_values():
    t = fam.rac_optimal_strategy().sequential()
    assert wt.linear_witness_wl(t).value == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert wt.rac_average_success(t).value == pytest.approx(0.5 * (1 + 1 / math.sqrt(2)), abs=1e-12)
    assert wt.rac_worst_case(t).value == pytest.approx(0.5 * (1 + 1 / math.sqrt(2)), abs=1e-12)
    assert wt.wl_violation(wt.linear_witness_wl(t).value)


@given(seeds)
@settings(max_examples=300, deadline=None)
def test_pb_wl_identity(seed):
    t = sm.random_sequential_table(np.random.default_rng(seed))
    wl = wt.linear_witness_wl(t).value
    assert wt.rac_average_success(t).value == pytest.approx((wl + 4) / 8, abs=1e-12)
    assert -4 <= wl <= 4


@given(seeds)
@settings(max_examples=300, deadline=None)
def test_w_equals_q_under_identity_map(seed):
    rng = np.random.default_rng(seed)
    ct = sc.conditional_table(sc.steer_assemblage(sm.random_two_qubit_state(rng),
                                                  sm.random_povm_pair(rng)),
                              sm.random_povm_pair(rng))
    seq = sc.sequential_from_conditional(ct)
    assert wt.witness_w(seq).value == pytest.approx(wt.quantity_q(ct).value, abs=1e-12)


def test_w_matrix_layout():
    t = fam.bb84_strategy().sequential()
    d = wt.w_matrix(t)
    # D[y, x0] = p(0|x0 0, y) - p(0|x0 1, y)
    assert np.allclose(d, [[1, 0], [0, 1]])


def test_sl_thresholds():
    assert wt.sl_thresholds(2) == pytest.approx(2 / 3)
    assert wt.sl_thresholds(2, maximally_mixed_marginals=True) == 0.5
    assert wt.sl_thresholds(3) == 0.5
    with pytest.raises(UnsupportedN):
        wt.sl_thresholds(4)


def _chsh_by_hand(p):
    e = [[sum((-1) ** (a + b) * p[x, y, a, b] for a in (0, 1) for b in (0, 1)) for y in (0, 1)]
         for x in (0, 1)]
    forms = [e[0][0] + e[0][1] + e[1][0] - e[1][1], e[0][0] + e[0][1] - e[1][0] + e[1][1],
             e[0][0] - e[0][1] + e[1][0] + e[1][1], -e[0][0] + e[0][1] + e[1][0] + e[1][1]]
    return max(abs(v) for v in forms)


@given(seeds)
@settings(max_examples=200, deadline=None)
def test_chsh_against_hand_expansion(seed):
    box = sm.random_ns_box(np.random.default_rng(seed))
    assert wt.chsh_value(box).value == pytest.approx(_chsh_by_hand(box.p), abs=1e-12)


@given(seeds)
@settings(max_examples=200, deadline=None)
def test_quantum_boxes_obey_tsirelson(seed):
    rng = np.random.default_rng(seed)
    box = sc.box_from_state(sm.random_two_qubit_state(rng), sm.random_povm_pair(rng),
                            sm.random_povm_pair(rng))
    assert wt.chsh_value(box).value <= 2 * math.sqrt(2) + 1e-12


def test_pr_box_extremes():
    box = fam.pr_box()
    assert wt.chsh_value(box).value == 4.0
    assert wt.quantity_q(sc.box_to_conditional(box)).value == 2.0
