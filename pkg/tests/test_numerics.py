import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorff_lab.homogeneous_models import QuadratureError, make_model
from hausdorff_lab.numerics import (
    DensityKernel,
    DiscreteKernel,
    DivergentIntegralError,
    QuadratureSpec,
    constant,
    doubling_estimate,
    fit_quadrature,
    gaussian_bump,
    haar_integral,
    lipschitz_estimate,
    lp_norm,
    measure_scaling_estimate,
    modular_estimate,
    phi_norm_pA,
    quotient_integral,
    resolved_modulus,
    rng_for,
    smooth_bump,
    weil_residual,
)

SQRT_PI = 1.77245385090551602729816748334


def gauss(*x):
    return np.exp(-sum(c * c for c in x))


# --- integrals -----------------------------------------------------------------------


def test_quotient_integral_examples(real_line, mod_circle):
    assert quotient_integral(real_line, gauss).value == pytest.approx(SQRT_PI, rel=1e-13)
    assert quotient_integral(mod_circle, gauss).value == pytest.approx(SQRT_PI, rel=1e-13)
    assert quotient_integral(real_line, lambda x: 0 * x).value == 0.0


def test_haar_integral_examples(real_line, mod_circle, motion):
    g = lambda t, th: np.exp(-t * t) * np.cos(th) ** 2
    assert haar_integral(mod_circle, g).value == pytest.approx(SQRT_PI / 2, rel=1e-13)
    assert haar_integral(real_line, gauss).value == pytest.approx(SQRT_PI, rel=1e-13)
    assert haar_integral(motion, lambda v1, v2, p: 0 * v1).value == 0.0


def test_gauss_legendre_scheme(real_line):
    est = quotient_integral(real_line, gauss, QuadratureSpec(box=8.0, nodes=200, scheme="gauss"))
    assert est.value == pytest.approx(SQRT_PI, rel=1e-13)


def test_weil_residual_examples(mod_circle, motion):
    g = lambda t, th: np.exp(-t * t) * np.cos(th) ** 2
    assert weil_residual(mod_circle, g) < 1e-6
    h = lambda v1, v2, p: np.exp(-(v1**2 + v2**2)) * (1 + np.cos(p)) * (1 + 0.3 * np.sin(v1 + p))
    assert weil_residual(motion, h) < 1e-6
    assert weil_residual(motion, lambda v1, v2, p: 0 * v1) == 0.0


def test_non_finite_node_reported(real_line):
    with pytest.raises(QuadratureError, match="node"):
        quotient_integral(real_line, lambda x: 1.0 / x, QuadratureSpec(box=1.0, nodes=3, scheme="gauss"))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=1)
    with pytest.raises(ValueError):
        QuadratureSpec(box=math.inf)
    with pytest.raises(ValueError):
        QuadratureSpec(box=((1.0, 0.0),))
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_refinement_stability(model, p):
    """Doubling the node count moves integrals and norms by < 1e-6 on smooth functions."""
    rng = rng_for(11)
    for _ in range(3):
        f = gaussian_bump(rng.uniform(-2, 2, model.quotient_dim), float(rng.uniform(0.5, 2.0)))
        n = 256 if model.quotient_dim == 2 else 4096
        coarse = QuadratureSpec(nodes=n)
        fine = QuadratureSpec(nodes=2 * n)
        assert abs(quotient_integral(model, f, coarse).value - quotient_integral(model, f, fine).value) < 1e-6
        assert abs(lp_norm(model, f, p, coarse) - lp_norm(model, f, p, fine)) < 1e-6
    g = lambda *x: np.exp(-sum(c * c for c, a in zip(x, model.angular) if not a)) * (1 + 0.5 * np.cos(x[-1]))
    n = {1: 4096, 2: 256, 3: 96}[model.group_dim]
    assert abs(haar_integral(model, g, QuadratureSpec(nodes=n)).value - haar_integral(model, g, QuadratureSpec(nodes=2 * n)).value) < 1e-6


# --- norms -------------------------------------------------------------------------------


def test_lp_norm_examples(real_line):
    bump = smooth_bump([0.0], 1.0)
    assert lp_norm(real_line, bump, math.inf, QuadratureSpec(box=2.0, nodes=4001)) == pytest.approx(1.0, abs=1e-6)
    assert lp_norm(real_line, gauss, 2.0) == pytest.approx(1.11951513492024762854, rel=1e-13)
    for p in (1.0, 2.0, math.inf):
        assert lp_norm(real_line, constant(0.0), p) == 0.0


def test_lp_norm_overflow_suggests_sup(real_line):
    f = lambda x: 1e10 * np.exp(-x * x)
    with pytest.raises(OverflowError, match="p=inf"):
        lp_norm(real_line, f, 400.0)


def test_lp_norm_rejects_small_p(real_line):
    with pytest.raises(ValueError):
        lp_norm(real_line, gauss, 0.5)


def test_fitted_grid_resolves_narrow_bump(real_line):
    f = gaussian_bump([3.0], 0.01)
    # int exp(-2 x^2 / w^2) = w sqrt(pi / 2)
    assert lp_norm(real_line, f, 2.0, fit_quadrature(f, 2.0)) == pytest.approx((0.01 * math.sqrt(math.pi / 2)) ** 0.5, rel=1e-10)


# --- phi norm ---------------------------------------------------------------------------


def test_phi_norm_examples(real_line, mod_circle):
    k = DiscreteKernel((1.0, 2.0), (1.0, 1.0), (1.0, 1.0))
    assert phi_norm_pA(real_line, k, 1.0) == pytest.approx(1.5, rel=1e-15)
    assert phi_norm_pA(real_line, k, math.inf) == 2.0
    kb = DiscreteKernel((2.0, 3.0), (1.0, 1.0), (1.0, 1.0))
    assert phi_norm_pA(mod_circle, kb, 1.0) == pytest.approx(0.833333333333333333, rel=1e-15)


def test_phi_norm_density(real_line):
    k = DensityKernel(1.0, math.inf, phi=lambda u: 1.0 / u, mu=lambda u: 1.0)
    for p in (1.0, 2.0, 4.0):
        assert phi_norm_pA(real_line, k, p) == pytest.approx(p, rel=1e-9)


def test_phi_norm_divergence_detected(real_line):
    k = DensityKernel(1.0, math.inf, phi=lambda u: 1.0 / u, mu=lambda u: 1.0)
    with pytest.raises(DivergentIntegralError):
        phi_norm_pA(real_line, k, math.inf)


def test_uniform_density_not_flagged(real_line):
    k = DensityKernel(0.5, 3.0, phi=lambda u: 1.0, mu=lambda u: 1.0)
    assert phi_norm_pA(real_line, k, math.inf) == pytest.approx(2.5, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(0.1, 10), st.floats(0, 5), st.floats(-5, 5), st.floats(0, 1)),
        min_size=1,
        max_size=6,
    ),
    st.floats(1, 10),
)
def test_phi_norm_monotone_in_abs_phi(rows, p):
    m = make_model("real-line")
    params, w, phi, shrink = zip(*rows)
    big = DiscreteKernel(params, w, phi)
    small = DiscreteKernel(params, w, tuple(s * v for s, v in zip(shrink, phi)))
    assert phi_norm_pA(m, small, p) <= phi_norm_pA(m, big, p)


# --- Monte-Carlo estimators ---------------------------------------------------------------


def test_measure_scaling_examples(real_line, mod_circle):
    assert measure_scaling_estimate(real_line, 3.0, seed=1).value == pytest.approx(3.0, rel=0.01)
    assert measure_scaling_estimate(real_line, 1.0, seed=1).value == pytest.approx(1.0, rel=0.01)
    assert measure_scaling_estimate(mod_circle, 0.5, seed=1).value == pytest.approx(0.5, rel=0.01)


def test_measure_scaling_within_three_stderr(model):
    for a in (0.5, 2.0, 3.0):
        est = measure_scaling_estimate(model, a, n_samples=200_000, seed=4)
        assert abs(est.value - float(model.modulus(a))) <= 3 * est.stderr


def test_measure_scaling_needs_samples(real_line):
    with pytest.raises(ValueError):
        measure_scaling_estimate(real_line, 2.0, n_samples=100)


def test_measure_scaling_reproducible(motion):
    a = measure_scaling_estimate(motion, 2.0, n_samples=20_000, seed=9)
    b = measure_scaling_estimate(motion, 2.0, n_samples=20_000, seed=9)
    assert a == b


def test_resolved_modulus_records_example_claim(mod_circle):
    r = resolved_modulus(mod_circle, 2.0, n_samples=200_000, seed=2)
    assert r["source"] == "analytic"
    assert r["example_claim"] == 1.0
    assert r["measured"] == pytest.approx(2.0, rel=0.01)


def test_modular_function_measured(motion):
    est = modular_estimate(motion, (1.0, -2.0, 2.5), n_samples=400_000, seed=3)
    assert est.value == pytest.approx(1.0, abs=3 * est.stderr + 1e-12)


def test_lipschitz_examples(real_line, mod_circle):
    assert lipschitz_estimate(real_line, 2.0) == pytest.approx(2.0, rel=1e-12)
    assert lipschitz_estimate(real_line, -3.0) == pytest.approx(3.0, rel=1e-12)
    assert lipschitz_estimate(mod_circle, 0.5) == pytest.approx(1.0, rel=1e-9)


def test_lipschitz_inverse_product(model):
    for a in (0.25, 0.5, 3.0, 7.0):
        assert lipschitz_estimate(model, a) * lipschitz_estimate(model, 1.0 / a) >= 1.0 - 1e-6


def test_doubling_real_line(real_line):
    est = doubling_estimate(real_line, seed=1)
    assert est.C == pytest.approx(2.0, rel=0.05)
    assert est.s == pytest.approx(1.0, rel=0.05)


def test_doubling_other_models(mod_circle, motion):
    b = doubling_estimate(mod_circle, radii=(0.1, 0.4, 1.6, 6.4), seed=1, samples_per_ball=50_000)
    assert 1.0 < b.C < 4.0 * 1.05
    c = doubling_estimate(motion, radii=(0.1, 0.2, 0.4, 0.8), seed=1)
    # three-dimensional growth at small radii
    assert c.C == pytest.approx(8.0, rel=0.05)
    assert c.s == pytest.approx(3.0, rel=0.05)


def test_doubling_input_errors(real_line, motion):
    with pytest.raises(ValueError, match="octave"):
        doubling_estimate(real_line, radii=(1.0, 2.0))
    with pytest.raises(ValueError, match="samples_per_ball"):
        doubling_estimate(motion, radii=(1e-3, 1e-2), samples_per_ball=1000)


def test_rng_streams_independent():
    a = rng_for(5, 1).random(4)
    assert np.array_equal(a, rng_for(5, 1).random(4))
    assert not np.array_equal(a, rng_for(5, 2).random(4))
    assert not np.array_equal(a, rng_for(6, 1).random(4))
