"""Quadrature and Monte-Carlo engines over the space models.

Tensor-product rules (midpoint or Gauss-Legendre on linear axes, periodic
midpoint on angular axes) integrate over truncation boxes; Monte-Carlo
estimators use a counter-based Philox generator so every estimate is
reproducible from its seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import roots_legendre

from .homogeneous_models import TWO_PI, QuadratureError, SpaceModel

DEFAULT_BOX = 12.0
DEFAULT_NODES = {1: 4096, 2: 256, 3: 128}
MAX_FITTED_NODES = {1: 400_000, 2: 2048, 3: 160}
DEFAULT_MC_SAMPLES = 1_000_000


class DivergentIntegralError(ArithmeticError):
    """A kernel functional over Omega did not converge."""


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator; ``stream`` selects an independent substream."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, 0, int(stream)]))


class IntegralEstimate(NamedTuple):
    value: float
    error: float


class MCEstimate(NamedTuple):
    value: float
    stderr: float
    n: int
    seed: int


class DoublingEstimate(NamedTuple):
    C: float
    s: float
    ratios: np.ndarray


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation box, nodes per axis, scheme and Monte-Carlo settings.

    ``box`` is either a half-width applied to every linear axis or an
    explicit per-coordinate sequence of ``(lo, hi)``.  Angular axes default
    to the full circle.
    """

    box: float | tuple = DEFAULT_BOX
    nodes: int | None = None
    scheme: str = "midpoint"
    mc_samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if self.nodes is not None and self.nodes < 2:
            raise ValueError("need at least 2 nodes per axis")
        if self.scheme not in ("midpoint", "gauss"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if isinstance(self.box, (int, float)):
            if not (math.isfinite(self.box) and self.box > 0):
                raise ValueError("truncation box must be finite and positive")
        else:
            for lo, hi in self.box:
                if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                    raise ValueError(f"bad box interval ({lo}, {hi})")


# --- quotient functions ----------------------------------------------------


@dataclass(frozen=True)
class QuotientFunction:
    """A function on G/K in quotient chart coordinates.

    ``box`` and ``scale`` are optional hints: the chart box outside which
    ``f - limit`` is negligible and the finest feature length.  They let
    integration routines size their grids.
    """

    func: Callable
    limit: float | None = None
    box: tuple | None = None
    scale: float | None = None
    name: str = ""

    def __call__(self, *coords):
        return self.func(*coords)


def gaussian_bump(center: Sequence[float], width: float, amplitude: float = 1.0, offset: float = 0.0) -> QuotientFunction:
    """``offset + amplitude * exp(-|x - center|^2 / width^2)``."""
    center = tuple(float(c) for c in np.atleast_1d(center))

    def f(*x):
        r2 = sum((xi - ci) ** 2 for xi, ci in zip(x, center))
        return offset + amplitude * np.exp(-r2 / width**2)

    box = tuple((c - 6.5 * width, c + 6.5 * width) for c in center)
    return QuotientFunction(f, limit=offset, box=box, scale=width, name=f"gauss(c={center}, w={width:g}, A={amplitude:g})")


def smooth_bump(center: Sequence[float], radius: float, amplitude: float = 1.0, offset: float = 0.0) -> QuotientFunction:
    """Compactly supported C-infinity bump ``exp(1 - 1 / (1 - |x - c|^2 / R^2))``."""
    center = tuple(float(c) for c in np.atleast_1d(center))

    def f(*x):
        s2 = sum((xi - ci) ** 2 for xi, ci in zip(x, center)) / radius**2
        inside = s2 < 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            core = np.exp(1.0 - 1.0 / np.where(inside, 1.0 - s2, 1.0))
        return offset + amplitude * np.where(inside, core, 0.0)

    box = tuple((c - radius, c + radius) for c in center)
    return QuotientFunction(f, limit=offset, box=box, scale=radius / 4, name=f"bump(c={center}, R={radius:g})")


def smoothed_indicator(center: Sequence[float], radius: float, edge: float, amplitude: float = 1.0) -> QuotientFunction:
    """Logistic-edged indicator of the ball of ``radius`` (edge width ``edge``)."""
    center = tuple(float(c) for c in np.atleast_1d(center))

    def f(*x):
        r = np.sqrt(sum((xi - ci) ** 2 for xi, ci in zip(x, center)))
        return amplitude * 0.5 * (1.0 - np.tanh((r - radius) / edge))

    reach = radius + 40 * edge
    box = tuple((c - reach, c + reach) for c in center)
    return QuotientFunction(f, limit=0.0, box=box, scale=edge, name=f"indicator(c={center}, R={radius:g})")


def constant(value: float) -> QuotientFunction:
    return QuotientFunction(lambda *x: np.full(np.broadcast(*x).shape, float(value))[()], limit=float(value), name=f"const({value:g})")


# --- kernels -----------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteKernel:
    """Finitely many automorphism parameters with mu-weights and Phi values."""

    params: tuple[float, ...]
    weights: tuple[float, ...]
    phis: tuple[float, ...]
    kind: str = field(default="discrete", init=False)

    def __post_init__(self):
        if not (len(self.params) == len(self.weights) == len(self.phis)):
            raise ValueError("params, weights and phis must have equal length")
        if len(self.params) == 0:
            raise ValueError("discrete kernel needs at least one point")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise ValueError("mu-weights must be finite and nonnegative")
        if any(not math.isfinite(v) for v in self.phis):
            raise ValueError("Phi values must be finite")

    def discretize(self):
        return np.array(self.params, float), np.array(self.weights, float), np.array(self.phis, float)

    def describe(self) -> dict:
        return {
            "type": "discrete",
            "points": [{"param": p, "weight": w, "phi": v} for p, w, v in zip(self.params, self.weights, self.phis)],
        }


@dataclass(frozen=True)
class DensityKernel:
    """Omega = [a, b] (endpoints may be infinite) with density mu(u) du and weight Phi(u).

    ``breakpoints`` mark discontinuities of Phi; every quadrature splits
    there.  ``nodes`` is the Gauss-Legendre count per piece used when the
    operator is applied.
    """

    a: float
    b: float
    phi: Callable
    mu: Callable
    nodes: int = 64
    breakpoints: tuple[float, ...] = ()
    phi_src: str | None = None
    mu_src: str | None = None
    kind: str = field(default="density", init=False)

    def __post_init__(self):
        if not (self.b > self.a) or math.isnan(self.a) or math.isnan(self.b):
            raise ValueError(f"degenerate parameter interval [{self.a}, {self.b}]")
        if self.nodes < 1:
            raise ValueError("need at least one node")

    def pieces(self) -> list[tuple[float, float]]:
        cuts = sorted({float(c) for c in self.breakpoints if self.a < c < self.b})
        ends = [self.a, *cuts, self.b]
        return list(zip(ends[:-1], ends[1:]))

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights (Lebesgue du) over all pieces."""
        us, ws = [], []
        for lo, hi in self.pieces():
            u, w = gauss_legendre_interval(lo, hi, self.nodes)
            us.append(u)
            ws.append(w)
        return np.concatenate(us), np.concatenate(ws)

    def discretize(self):
        u, w = self.rule()
        mu = np.broadcast_to(np.asarray(self.mu(u), float), u.shape)
        phi = np.broadcast_to(np.asarray(self.phi(u), float), u.shape)
        return u, w * mu, phi

    def describe(self) -> dict:
        return {
            "type": "density",
            "a": self.a,
            "b": self.b,
            "phi": self.phi_src or "<callable>",
            "mu": self.mu_src or "<callable>",
            "nodes": self.nodes,
        }


Kernel = DiscreteKernel | DensityKernel


def gauss_legendre_interval(lo: float, hi: float, n: int):
    """Gauss-Legendre rule on [lo, hi]; infinite ends handled by u = lo + s/(1-s)."""
    x, w = roots_legendre(n)
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w
    if math.isfinite(lo):
        return lo + s / (1.0 - s), ws / (1.0 - s) ** 2
    if math.isfinite(hi):
        return hi - s / (1.0 - s), ws / (1.0 - s) ** 2
    t = x
    return np.tan(0.5 * math.pi * t), w * 0.5 * math.pi / np.cos(0.5 * math.pi * t) ** 2


def check_kernel(model: SpaceModel, kernel) -> None:
    """Reject parameters that are not automorphisms of the model."""
    if isinstance(kernel, DiscreteKernel):
        model.check_param(np.array(kernel.params))
        return
    if kernel.a <= 0 <= kernel.b:
        raise ValueError(f"{model.model_id.value}: parameter interval [{kernel.a}, {kernel.b}] reaches 0")
    u, _ = kernel.rule()
    model.check_param(u)


def kernel_integral(kernel: DensityKernel, h: Callable) -> float:
    """Integral of h(u) du over the kernel's interval, piecewise by adaptive quadrature.

    Raises :class:`DivergentIntegralError` when a piece fails to converge.
    """
    total = 0.0
    for lo, hi in kernel.pieces():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val, err, *rest = sp_integrate.quad(
                lambda u: float(h(np.float64(u))), lo, hi, limit=400, epsabs=1e-14, epsrel=1e-11, full_output=1
            )
        if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
            raise DivergentIntegralError(
                f"integral over [{lo:g}, {hi:g}] did not converge (value {val:.6g}, error {err:.3g}); "
                "the kernel functional is likely infinite"
            )
        total += val
    return total


def kernel_terms(model: SpaceModel, kernel):
    """(params, mu-weights, Phi-values) actually used when applying the operator."""
    check_kernel(model, kernel)
    return kernel.discretize()


def phi_norm_pA(model: SpaceModel, kernel, p: float) -> float:
    """``int |Phi(u)| (mod A(u))^{-1/p} dmu(u)``; p = inf drops the modulus factor."""
    if p < 1:
        raise ValueError("p must be >= 1")
    check_kernel(model, kernel)
    expo = 0.0 if math.isinf(p) else -1.0 / p
    if isinstance(kernel, DiscreteKernel):
        params, w, phi = kernel.discretize()
        return float(np.sum(w * np.abs(phi) * model.modulus(params) ** expo))
    return kernel_integral(
        kernel, lambda u: abs(kernel.phi(u)) * kernel.mu(u) * float(model.modulus(u)) ** expo
    )


# --- tensor quadrature -------------------------------------------------------


def _axis_rule(lo, hi, n, scheme, angular):
    if angular and hi - lo >= TWO_PI - 1e-12:
        lo, hi = -math.pi, math.pi
        scheme = "midpoint"
    if scheme == "midpoint":
        h = (hi - lo) / n
        return lo + (np.arange(n) + 0.5) * h, np.full(n, h)
    x, w = roots_legendre(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _boxes(quad: QuadratureSpec, angular: Sequence[bool]):
    if isinstance(quad.box, (int, float)):
        return tuple((-math.pi, math.pi) if ang else (-float(quad.box), float(quad.box)) for ang in angular)
    box = tuple(quad.box)
    if len(box) != len(angular):
        raise ValueError(f"box has {len(box)} axes, chart has {len(angular)}")
    return box


def tensor_rule(quad: QuadratureSpec, angular: Sequence[bool]):
    """Open-grid nodes and per-axis weights for a box rule."""
    n = quad.nodes or DEFAULT_NODES[len(angular)]
    axes = [_axis_rule(lo, hi, n, quad.scheme, ang) for (lo, hi), ang in zip(_boxes(quad, angular), angular)]
    nodes = np.ix_(*[a[0] for a in axes])
    return nodes, [a[1] for a in axes]


def _evaluate(fn, nodes):
    shape = tuple(len(np.ravel(g)) for g in nodes)
    with np.errstate(all="ignore"):
        vals = np.broadcast_to(np.asarray(fn(*nodes), dtype=float), shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = np.unravel_index(np.argmax(bad), shape)
        where = tuple(float(np.ravel(g)[i]) for g, i in zip(nodes, idx))
        raise QuadratureError(f"non-finite integrand value at node {where}")
    return vals


def _contract(vals, weights):
    out = vals
    for w in reversed(weights):
        out = out @ w
    return float(out)


def _box_integral(fn, quad, angular, density=1.0, with_error=True):
    nodes, weights = tensor_rule(quad, angular)
    value = density * _contract(_evaluate(fn, nodes), weights)
    if not with_error:
        return IntegralEstimate(value, math.nan)
    n = quad.nodes or DEFAULT_NODES[len(angular)]
    coarse_q = QuadratureSpec(quad.box, max(2, n // 2), quad.scheme, quad.mc_samples, quad.seed)
    cn, cw = tensor_rule(coarse_q, angular)
    coarse = density * _contract(_evaluate(fn, cn), cw)
    return IntegralEstimate(value, abs(value - coarse))


def default_quadrature(model: SpaceModel, f=None, p: float = 1.0) -> QuadratureSpec:
    if f is not None and getattr(f, "box", None) is not None and getattr(f, "scale", None):
        return fit_quadrature(f, p)
    return QuadratureSpec()


def fit_quadrature(f: QuotientFunction, p: float = 1.0, max_nodes: int | None = None) -> QuadratureSpec:
    """Grid sized from a function's box and feature-scale hints.

    Finite p uses about 4 sqrt(p) nodes per feature length; p = inf needs a
    much finer grid because the sup is read off the nodes.
    """
    dim = len(f.box)
    per_scale = 48.0 if math.isinf(p) else 4.0 * math.sqrt(max(p, 1.0))
    h = f.scale / per_scale
    extent = max(hi - lo for lo, hi in f.box)
    cap = max_nodes or MAX_FITTED_NODES[dim]
    n = int(min(cap, max(16, math.ceil(extent / h))))
    return QuadratureSpec(box=tuple(f.box), nodes=n)


def quotient_integral(model: SpaceModel, f: Callable, quad: QuadratureSpec | None = None) -> IntegralEstimate:
    """Integral over G/K against lambda (Lebesgue in the quotient chart)."""
    quad = quad or default_quadrature(model, f)
    return _box_integral(f, quad, (False,) * model.quotient_dim)


def haar_integral(model: SpaceModel, g: Callable, quad: QuadratureSpec | None = None) -> IntegralEstimate:
    """Integral over G against the normalized left Haar measure."""
    quad = quad or QuadratureSpec()
    return _box_integral(g, quad, model.angular, density=model.haar_density)


def weil_residual(
    model: SpaceModel,
    g: Callable,
    quad: QuadratureSpec | None = None,
    k_nodes: int = 64,
    quotient_quad: QuadratureSpec | None = None,
) -> float:
    """|int_G g dnu - int_{G/K} int_K g(xk) dk dlambda|, each side by its own rule."""
    lhs = haar_integral(model, g, quad).value
    if quotient_quad is None:
        qbox = DEFAULT_BOX if quad is None else quad.box
        if not isinstance(qbox, (int, float)):
            qbox = tuple(b for b, ang in zip(qbox, model.angular) if not ang)
        quotient_quad = QuadratureSpec(box=qbox)

    def averaged(*q):
        return model.k_average(g, model.section(q), nodes=k_nodes)

    rhs = quotient_integral(model, averaged, quotient_quad).value
    return abs(lhs - rhs)


def lp_norm(model: SpaceModel, f: Callable, p: float, quad: QuadratureSpec | None = None) -> float:
    """L^p(G/K) norm; p = inf is the sup over quadrature nodes."""
    if p < 1:
        raise ValueError("p must be >= 1")
    quad = quad or default_quadrature(model, f, p)
    angular = (False,) * model.quotient_dim
    nodes, weights = tensor_rule(quad, angular)
    vals = np.abs(_evaluate(f, nodes))
    if math.isinf(p):
        return float(vals.max())
    with np.errstate(over="ignore"):
        powered = vals**p
        total = _contract(powered, weights)
        result = total ** (1.0 / p)
    if not math.isfinite(result):
        raise OverflowError(f"|f|^p overflowed for p={p:g}; use p=inf for the sup-norm path")
    return float(result)


# --- Monte-Carlo estimators -------------------------------------------------


def _uniform_in_box(rng, box, n):
    return tuple(rng.uniform(lo, hi, n) for lo, hi in box)


def _box_haar_volume(model, box):
    return model.haar_density * math.prod(hi - lo for lo, hi in box)


def _padded_ball_box(model, center, r, pad=1.25):
    box = []
    for (lo, hi), ang in zip(model.ball_box(center, r * pad), model.angular):
        if ang:
            mid = 0.5 * (lo + hi)
            half = min(0.5 * (hi - lo), math.pi)
            box.append((mid - half, mid + half))
        else:
            box.append((lo, hi))
    return tuple(box)


def ball_volume_estimate(model: SpaceModel, center, r: float, n: int, rng) -> tuple[float, float, int]:
    """Hit-or-miss estimate of nu(B(center, r)); returns (value, stderr, hits)."""
    box = _padded_ball_box(model, center, r)
    pts = _uniform_in_box(rng, box, n)
    hits = int(np.count_nonzero(model.dist(tuple(center), pts) < r))
    vol = _box_haar_volume(model, box)
    frac = hits / n
    return vol * frac, vol * math.sqrt(frac * (1 - frac) / n), hits


def measure_scaling_estimate(model: SpaceModel, a: float, n_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> MCEstimate:
    """Monte-Carlo ratio nu(A(E)) / nu(E) for E = B(e, 1), with delta-method stderr."""
    if n_samples < 10_000:
        raise ValueError("measure_scaling_estimate needs at least 1e4 samples")
    model.check_param(a)
    e = model.identity()
    base_box = _padded_ball_box(model, e, 1.0)
    # image of E's box: push the corners through A
    corners = np.array(np.meshgrid(*[list(b) for b in base_box], indexing="ij")).reshape(len(base_box), -1)
    img = model.auto_apply(a, tuple(corners))
    img_box = tuple(
        b if ang else (float(np.min(c)), float(np.max(c))) for b, c, ang in zip(base_box, img, model.angular)
    )
    rng_e, rng_a = rng_for(seed, 1), rng_for(seed, 2)
    pts = _uniform_in_box(rng_e, base_box, n_samples)
    f_e = np.count_nonzero(model.dist(e, pts) < 1.0) / n_samples
    pts = _uniform_in_box(rng_a, img_box, n_samples)
    back = model.auto_apply(model.inverse_param(a), pts)
    f_a = np.count_nonzero(model.dist(e, back) < 1.0) / n_samples
    if f_e == 0 or f_a == 0:
        raise ValueError("degenerate test set: no Monte-Carlo hits")
    v_e = _box_haar_volume(model, base_box) * f_e
    v_a = _box_haar_volume(model, img_box) * f_a
    rel = math.sqrt((1 - f_e) / (f_e * n_samples) + (1 - f_a) / (f_a * n_samples))
    ratio = v_a / v_e
    return MCEstimate(ratio, ratio * rel, n_samples, seed)


def lipschitz_estimate(model: SpaceModel, a: float, n_pairs: int = 10_000, seed: int = 0) -> float:
    """Largest sampled rho(Ax, Ay) / rho(x, y); a lower bound for the Lipschitz constant.

    Half of the displacements run along single chart axes, half in random
    directions, with lengths log-uniform over [1e-3, 10].
    """
    if n_pairs < 10_000:
        raise ValueError("lipschitz_estimate needs at least 1e4 pairs")
    model.check_param(a)
    rng = rng_for(seed, 3)
    dim = model.group_dim
    x = model.random_points(rng, n_pairs)
    lengths = np.exp(rng.uniform(math.log(1e-3), math.log(10.0), n_pairs))
    dirs = rng.normal(size=(dim, n_pairs))
    axis = rng.integers(0, dim, n_pairs)
    along = rng.random(n_pairs) < 0.5
    dirs[:, along] = 0.0
    dirs[axis[along], np.nonzero(along)[0]] = rng.choice([-1.0, 1.0], int(along.sum()))
    dirs /= np.linalg.norm(dirs, axis=0)
    y = []
    for i, ang in enumerate(model.angular):
        step = dirs[i] * lengths
        if ang:
            step = np.clip(step, -math.pi + 1e-9, math.pi - 1e-9)
        y.append(x[i] + step)
    y = tuple(y)
    d0 = model.dist(x, y)
    keep = d0 > 0
    d1 = model.dist(model.auto_apply(a, x), model.auto_apply(a, y))
    return float(np.max(d1[keep] / d0[keep]))


def doubling_estimate(
    model: SpaceModel,
    n_centers: int = 8,
    radii: Sequence[float] = (0.1, 0.2, 0.4, 0.8, 1.6),
    seed: int = 0,
    samples_per_ball: int = 100_000,
    min_hits: int = 200,
) -> DoublingEstimate:
    """Sampled max of nu(B(x, 2r)) / nu(B(x, r)) and s = log2 of it."""
    radii = sorted(float(r) for r in radii)
    if len(radii) < 2 or radii[-1] / radii[0] < 4.0 - 1e-12:
        raise ValueError("radii must span at least two dyadic octaves")
    rng = rng_for(seed, 4)
    centers = model.random_points(rng, n_centers)
    ratios = np.empty((n_centers, len(radii)))
    for i in range(n_centers):
        c = tuple(float(col[i]) for col in centers)
        for j, r in enumerate(radii):
            small, _, hits = ball_volume_estimate(model, c, r, samples_per_ball, rng)
            if hits < min_hits:
                raise ValueError(
                    f"only {hits} Monte-Carlo hits in B(x, {r:g}); raise samples_per_ball or the smallest radius"
                )
            big, _, _ = ball_volume_estimate(model, c, 2 * r, samples_per_ball, rng)
            ratios[i, j] = big / small
    C = max(1.0, float(ratios.max()))
    return DoublingEstimate(C, math.log2(C), ratios)


def modular_estimate(model: SpaceModel, x, n_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> MCEstimate:
    """Monte-Carlo nu(E x) / nu(E) for E = B(e, 1) (right translation), i.e. Delta_G(x)."""
    x = tuple(float(c) for c in x)
    e = model.identity()
    rng_e, rng_x = rng_for(seed, 5), rng_for(seed, 6)
    box_e = _padded_ball_box(model, e, 1.0)
    pts = _uniform_in_box(rng_e, box_e, n_samples)
    f_e = np.count_nonzero(model.dist(e, pts) < 1.0) / n_samples
    box_x = _padded_ball_box(model, e, 1.0 + float(model.norm(x)))
    pts = _uniform_in_box(rng_x, box_x, n_samples)
    back = model.group_mul(pts, model.group_inv(x))
    f_x = np.count_nonzero(model.dist(e, back) < 1.0) / n_samples
    v_e = _box_haar_volume(model, box_e) * f_e
    v_x = _box_haar_volume(model, box_x) * f_x
    rel = math.sqrt((1 - f_e) / (f_e * n_samples) + (1 - f_x) / (f_x * n_samples))
    return MCEstimate(v_x / v_e, v_x / v_e * rel, n_samples, seed)


def resolved_modulus(model: SpaceModel, a: float, n_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0, rtol: float = 0.01) -> dict:
    """Analytic modulus cross-checked against the scaling oracle.

    On disagreement beyond ``rtol`` the measured value wins.
    """
    analytic = float(model.modulus(a))
    est = measure_scaling_estimate(model, a, n_samples, seed)
    agree = abs(est.value / analytic - 1.0) <= rtol
    out = {
        "param": float(a),
        "analytic": analytic,
        "measured": est.value,
        "stderr": est.stderr,
        "value": analytic if agree else est.value,
        "source": "analytic" if agree else "measured",
    }
    claimed = model.example_modulus(a)
    if claimed is not None:
        out["example_claim"] = float(claimed)
    return out
