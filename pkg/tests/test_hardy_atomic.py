import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorff_lab.hardy_atomic import (
    AtomCandidate,
    AtomError,
    AtomicDecomposition,
    Ball,
    apply_to_decomposition,
    atom_corpus,
    atoms_from_entries,
    cesaro_h1_formula,
    constructed_violations,
    discrete_h1_formula,
    h1_bound,
    h1_upper,
    k_average_atom,
    l1_lower,
    make_haar_atom,
    pushforward_atom,
    quotient_view,
    resolve_k,
    transported_matches,
    verify_atom,
)
from hausdorff_lab.hausdorff_op import cesaro_kernel, density_kernel, discrete_kernel, sequence_kernel
from hausdorff_lab.homogeneous_models import make_model
from hausdorff_lab.numerics import DiscreteKernel, QuadratureSpec, rng_for

GEOMETRIC_H1_BOUND = 2.6666660308837890625  # 2 sum_{j<=10} 4^-j


def step_atom(pos=0.5, neg=-0.5):
    """pos on [0, 1), neg on [-1, 0)."""

    def a(x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x < 1), pos, np.where((x >= -1) & (x < 0), neg, 0.0))

    return AtomCandidate(a, Ball((0.0,), 1.0), k_invariant=True, name="step")


CANONICAL = step_atom()


# --- verify_atom ------------------------------------------------------------------------


def test_canonical_atom_passes(real_line):
    rep = verify_atom(real_line, CANONICAL)
    assert rep.passed
    assert rep.sup_value == 0.5
    assert rep.ball_volume == 2.0
    assert rep.integral_residual == 0.0
    assert rep.support_residual == 0.0


def test_sup_violation(real_line):
    rep = verify_atom(real_line, step_atom(1.0, -1.0))
    assert rep.failed == ["sup"]
    assert rep.sup_excess == pytest.approx(1.0)


def test_integral_violation(real_line):
    rep = verify_atom(real_line, step_atom(0.5, -0.4))
    assert rep.failed == ["integral"]
    assert rep.integral_residual == pytest.approx(0.1, rel=1e-3)


def test_support_violation(real_line):
    shifted = AtomCandidate(CANONICAL.func, Ball((0.3,), 1.0))
    assert "support" in verify_atom(real_line, shifted).failed


def test_ball_requires_positive_radius():
    with pytest.raises(ValueError):
        Ball((0.0,), 0.0)
    with pytest.raises(ValueError):
        Ball((0.0,), math.inf)


# --- make_haar_atom -----------------------------------------------------------------------


def test_haar_atom_real_line_is_canonical(real_line):
    a = make_haar_atom(real_line, Ball((0.0,), 1.0))
    x = np.array([-0.9, -0.5, -0.1, 0.1, 0.5, 0.9, 1.0, 1.5, -1.2])
    assert np.array_equal(a(x), CANONICAL(x))


def test_haar_atom_motion_group(motion):
    a = make_haar_atom(motion, Ball(motion.identity(), 1.0), (1.0, 0.0, 0.0))
    rep = verify_atom(motion, a)
    assert rep.passed
    assert rep.sup_value == pytest.approx(1.0 / float(motion.ball_volume(1.0)), rel=1e-12)
    assert rep.sup_value == pytest.approx(3.0, rel=1e-12)


def test_haar_atom_mod_circle(mod_circle):
    rep = verify_atom(mod_circle, make_haar_atom(mod_circle, Ball(mod_circle.identity(), 0.5)))
    assert rep.passed
    assert max(rep.support_residual, rep.sup_excess, rep.integral_residual) < 1e-6


def test_haar_atom_orientation_checked(motion):
    with pytest.raises(ValueError):
        make_haar_atom(motion, Ball(motion.identity(), 1.0), (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        make_haar_atom(motion, Ball(motion.identity(), 1.0), (1.0, 0.0))


@settings(max_examples=15, deadline=None)
@given(
    mid=st.sampled_from(["real-line", "complex-mod-circle", "motion-group-plane"]),
    seed=st.integers(0, 10_000),
)
def test_generated_atoms_pass(mid, seed):
    m = make_model(mid)
    for a in atom_corpus(m, 2, seed=seed):
        rep = verify_atom(m, a)
        assert max(rep.support_residual, rep.sup_excess, rep.integral_residual) < 1e-6


def test_constructed_violations_fail_on_intended_axiom(model):
    cases = constructed_violations(model, seed=4)
    assert len(cases) == 10
    for cand, axiom in cases:
        assert verify_atom(model, cand).failed == [axiom]


def test_atoms_from_entries(motion):
    atoms = atoms_from_entries(motion, [{"center": [1.0, 2.0, 0.5], "radius": 0.7, "orientation": [0, 1, 0]}])
    assert verify_atom(motion, atoms[0]).passed
    with pytest.raises(ValueError):
        atoms_from_entries(motion, [{"center": [1.0], "radius": 0.7}])


# --- K-averaging --------------------------------------------------------------------------


def test_k_average_of_invariant_atom(mod_circle):
    """An atom already constant on circles is only rescaled by c = nu(B) / nu(B')."""
    r = math.pi + 1.0
    h = 1.0 / float(mod_circle.ball_volume(r))
    a = AtomCandidate(lambda t, th: np.where(np.abs(t) < 1, h * np.sign(t), 0.0) + 0 * th, Ball((0.0, 0.0), r))
    assert verify_atom(mod_circle, a).passed
    b = k_average_atom(mod_circle, a)
    c = (math.pi + 2) / (3 * math.pi + 2)
    assert b.meta["c"] == pytest.approx(c, rel=1e-14)
    assert b.ball.radius == pytest.approx(r + math.pi)
    t = np.linspace(-2, 2, 41)
    th = np.linspace(0, 6, 41)
    assert np.allclose(b(t, th), c * a(t, th), atol=1e-15)
    assert verify_atom(mod_circle, b).passed


def test_k_average_trivial_k(real_line):
    b = k_average_atom(real_line, CANONICAL)
    assert b.func is CANONICAL.func
    assert b.meta["c"] == 1.0
    assert b.ball == CANONICAL.ball


def test_k_average_motion_group(motion):
    a = make_haar_atom(motion, Ball((0.5, -1.0, 2.0), 1.0), (1.0, 1.0, 0.0))
    b = k_average_atom(motion, a)
    assert b.ball.radius == pytest.approx(1.0 + math.pi)
    # ball-volume ratio from direct integration
    assert b.meta["c"] == pytest.approx(0.0142775826222643281783984322828, rel=1e-13)
    assert verify_atom(motion, b).passed


def test_k_averaged_atoms_right_invariant(model):
    rng = rng_for(8)
    for a in atom_corpus(model, 3, seed=2):
        b = k_average_atom(model, a)
        x = model.random_points(rng, 300, scale=3.0)
        k = model.k_element(rng.uniform(0, 2 * math.pi, 300))
        assert float(np.max(np.abs(b(*model.group_mul(x, k)) - b(*x)))) < 1e-9


# --- pushforward ---------------------------------------------------------------------------


def test_pushforward_dilation_by_two(real_line):
    b, scale = pushforward_atom(real_line, CANONICAL, 2.0)
    assert scale == 1.0
    assert b.ball == Ball((0.0,), 0.5)
    x = np.linspace(-1, 1, 101)
    assert np.array_equal(b(x), CANONICAL(2 * x))
    assert b.meta["k_source"] == "kappa/mod"


def test_pushforward_identity(real_line):
    b, scale = pushforward_atom(real_line, CANONICAL, 1.0)
    assert scale == 2.0
    assert b.ball == CANONICAL.ball
    x = np.linspace(-1.5, 1.5, 31)
    assert np.array_equal(b(x), CANONICAL(x) / 2)


def test_pushforward_dilation_by_half(real_line):
    b, scale = pushforward_atom(real_line, CANONICAL, 0.5)
    assert scale == 4.0
    assert b.ball == Ball((0.0,), 2.0)
    assert b.meta["report"]["sup_value"] == 0.125
    x = np.linspace(-3, 3, 61)
    assert np.array_equal(b(x), CANONICAL(x / 2) / 4)


@pytest.mark.parametrize("c", [1 / 8, 1 / 4, 1 / 2, 1, 2, 4, 8, -1 / 8, -3.0])
def test_pushforward_sound_on_dilation_range(real_line, c):
    a = make_haar_atom(real_line, Ball((1.3,), 0.4))
    b, _ = pushforward_atom(real_line, a, c)
    assert verify_atom(real_line, b).passed


def test_kappa_over_mod_k_fails_on_mod_circle(mod_circle):
    """The formula k = kappa / mod gives 1/2 for u = 2, too small for the product metric."""
    a = k_average_atom(mod_circle, make_haar_atom(mod_circle, Ball((0.0, 0.0), 0.5)))
    with pytest.raises(AtomError, match="support"):
        pushforward_atom(mod_circle, a, 2.0, k=0.5)
    k, source = resolve_k(mod_circle, 2.0)
    assert source == "measured-lipschitz"
    assert k == pytest.approx(1.0, rel=1e-9)
    b, scale = pushforward_atom(mod_circle, a, 2.0)
    assert b.meta["k_source"] == "measured-lipschitz"
    assert scale == pytest.approx(4.0, rel=1e-9)


def test_resolve_k_regimes(mod_circle, motion):
    assert resolve_k(mod_circle, 0.5) == (2.0, "kappa/mod")
    assert resolve_k(motion, 0.5) == (4.0, "kappa/mod")
    k, source = resolve_k(motion, 3.0)
    assert source == "measured-lipschitz"
    assert k == pytest.approx(1.0, rel=1e-9)


# --- decompositions -------------------------------------------------------------------------


def test_h1_upper_examples():
    assert h1_upper(AtomicDecomposition([(1.0, CANONICAL)])) == 1.0
    assert h1_upper(AtomicDecomposition([(0.5, CANONICAL), (-0.25, CANONICAL)])) == 0.75
    assert h1_upper(AtomicDecomposition()) == 0.0


def test_l1_lower_examples(real_line):
    quad = QuadratureSpec(box=1.0, nodes=4096)
    d = AtomicDecomposition([(1.0, CANONICAL)])
    assert l1_lower(real_line, quotient_view(real_line, d), quad) == pytest.approx(1.0, rel=1e-14)
    assert l1_lower(real_line, lambda x: 0 * x, quad) == 0.0
    half = AtomicDecomposition([(0.5, CANONICAL)])
    assert l1_lower(real_line, quotient_view(real_line, half), quad) == pytest.approx(0.5, rel=1e-14)
    assert l1_lower(real_line, quotient_view(real_line, d), quad) <= h1_upper(d)


def test_apply_to_decomposition_point_mass(real_line):
    d = AtomicDecomposition([(1.0, CANONICAL)])
    t = apply_to_decomposition(real_line, DiscreteKernel((2.0,), (1.0,), (1.0,)), d)
    assert len(t) == 1
    coeff, b = t.terms[0]
    assert coeff == 1.0
    x = np.linspace(-1, 1, 201)
    assert np.array_equal(t(x), CANONICAL(2 * x))


def test_apply_to_decomposition_zero_kernel(real_line):
    t = apply_to_decomposition(real_line, DiscreteKernel((2.0,), (1.0,), (0.0,)), AtomicDecomposition([(1.0, CANONICAL)]))
    assert len(t) == 0
    assert np.all(t(np.linspace(-1, 1, 5)) == 0.0)


def test_apply_to_decomposition_double_sum(real_line):
    a1 = make_haar_atom(real_line, Ball((0.5,), 0.3))
    a2 = make_haar_atom(real_line, Ball((-2.0,), 1.2), (-1.0,))
    d = AtomicDecomposition([(0.5, a1), (-0.25, a2)])
    k = DiscreteKernel((0.5, 4.0), (1.0, 2.0), (0.3, -0.7))
    t = apply_to_decomposition(real_line, k, d)
    assert len(t) == 4
    # sum over (u, j) of |Phi(u) w_u| C_nu k(u)^s |alpha_j| with k = 1/|u|
    expected = sum(abs(phi * w) * 2.0 / u * 0.75 for u, w, phi in zip(k.params, k.weights, k.phis))
    assert h1_upper(t) == pytest.approx(expected, rel=1e-14)
    assert transported_matches(real_line, k, d, t) < 1e-12
    assert h1_upper(t) <= h1_bound(real_line, k).bound * h1_upper(d) * (1 + 1e-6)


def test_transport_reexpansion_nontrivial_k(mod_circle):
    atoms = [k_average_atom(mod_circle, a) for a in atom_corpus(mod_circle, 2, seed=6)]
    d = AtomicDecomposition([(1.0, atoms[0]), (-0.5, atoms[1])])
    k = discrete_kernel([0.5, 0.5], [-2.0, 0.5])
    t = apply_to_decomposition(mod_circle, k, d)
    assert transported_matches(mod_circle, k, d, t) < 1e-6
    assert h1_upper(t) <= h1_bound(mod_circle, k).bound * h1_upper(d) * (1 + 1e-6)


# --- H^1 bounds ------------------------------------------------------------------------------


def test_h1_bound_point_mass(real_line):
    assert h1_bound(real_line, DiscreteKernel((2.0,), (1.0,), (1.0,))).bound == 1.0


def test_h1_bound_geometric(real_line):
    k, _ = sequence_kernel(real_line, lambda j: 2.0**-j, lambda j: 2.0**j, 11, 1.0)
    rep = h1_bound(real_line, k)
    assert rep.bound == pytest.approx(GEOMETRIC_H1_BOUND, rel=1e-14)
    assert discrete_h1_formula(real_line, k) == pytest.approx(GEOMETRIC_H1_BOUND, rel=1e-14)


def test_h1_bound_cesaro(real_line):
    base = density_kernel(1.0, math.inf, "1")
    rep = h1_bound(real_line, cesaro_kernel(real_line, base))
    assert rep.bound == pytest.approx(2.0, rel=1e-9)
    assert cesaro_h1_formula(real_line, base) == pytest.approx(2.0, rel=1e-9)


def test_h1_bound_divergent(real_line):
    rep = h1_bound(real_line, density_kernel(1.0, math.inf, "1"))
    assert rep.status.startswith("unbounded-hypothesis-violated")
    assert rep.bound == math.inf
    # finite interval keeps the logarithm finite: 2 log(1e4)
    assert h1_bound(real_line, density_kernel(1e-4, 1.0, "1")).bound == pytest.approx(2 * math.log(1e4), rel=1e-9)


def test_h1_bound_density_fallback(mod_circle):
    """Outside the kappa/mod regime the bound uses per-node measured k."""
    k = density_kernel(0.5, 2.0, "1", nodes=16)
    rep = h1_bound(mod_circle, k)
    assert rep.extra["k_sources"].get("measured-lipschitz", 0) > 0
    # C_nu int_{0.5}^{2} max(1/u, 1)^2 du = 4 (1 + 1) with k = 1/u below 1 and 1 above
    assert rep.bound == pytest.approx(4 * (1.0 + 1.0), rel=1e-3)


def test_h1_bound_with_corpus(real_line):
    k = discrete_kernel([0.5, 0.5], [0.25, 3.0])
    corpus = [AtomicDecomposition([(1.0, CANONICAL)]), AtomicDecomposition([(2.0, make_haar_atom(real_line, Ball((4.0,), 2.0)))])]
    rep = h1_bound(real_line, k, corpus)
    assert rep.empirical is not None
    assert rep.passed


def test_sandwich_on_corpus(model):
    atoms = [k_average_atom(model, a) for a in atom_corpus(model, 2, seed=9)]
    d = AtomicDecomposition([(0.7, atoms[0]), (0.3, atoms[1])])
    lo = np.full(model.quotient_dim, np.inf)
    hi = -lo
    for _, a in d.terms:
        q = np.array([float(c) for c in model.project(a.ball.center)])
        lo, hi = np.minimum(lo, q - a.ball.radius), np.maximum(hi, q + a.ball.radius)
    quad = QuadratureSpec(box=tuple(zip(lo, hi)), nodes=4096 if model.quotient_dim == 1 else 256)
    assert l1_lower(model, quotient_view(model, d), quad) <= h1_upper(d)
