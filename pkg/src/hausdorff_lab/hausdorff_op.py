"""Hausdorff operators on G/K: application, Lebesgue-space bounds, regularity.

The operator with kernel (Omega, mu, Phi) and automorphism family A(u) acts
on functions on G/K by

    (H f)(x) = int_Omega Phi(u) f(A(u) x) dmu(u).

Discrete kernels are summed exactly; density kernels are discretized with
Gauss-Legendre nodes, so the applied operator is always a finite sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expressions import parse_expression
from .homogeneous_models import SpaceModel
from .numerics import (
    DensityKernel,
    DiscreteKernel,
    DivergentIntegralError,
    QuadratureSpec,
    QuotientFunction,
    fit_quadrature,
    gaussian_bump,
    kernel_integral,
    kernel_terms,
    lp_norm,
    phi_norm_pA,
    rng_for,
)

CESARO_BOUNDARY_TOL = 1e-9
DEFAULT_RADII = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass
class BoundReport:
    """An analytic upper bound next to an empirical measurement."""

    name: str
    bound: float
    empirical: float | None = None
    tol: float = 1e-3
    model: str = ""
    kernel: dict = field(default_factory=dict)
    seed: int | None = None
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float | None:
        if self.empirical is None or not math.isfinite(self.bound) or self.bound == 0:
            return None
        return self.empirical / self.bound

    @property
    def passed(self) -> bool:
        if self.status != "ok" or not math.isfinite(self.bound):
            return False
        if self.empirical is None:
            return True
        return self.empirical <= self.bound * (1.0 + self.tol) + 1e-300

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bound": self.bound,
            "empirical": self.empirical,
            "ratio": self.ratio,
            "tol": self.tol,
            "passed": self.passed,
            "status": self.status,
            "model": self.model,
            "kernel": self.kernel,
            "seed": self.seed,
            **self.extra,
        }


# --- construction -------------------------------------------------------------


def discrete_kernel(coeffs: Sequence[float], autos: Sequence[float]) -> DiscreteKernel:
    """Discrete operator sum_j Phi(j) f(A(j) x) with unit mu-weights."""
    coeffs, autos = list(coeffs), list(autos)
    if len(coeffs) != len(autos):
        raise ValueError(f"{len(coeffs)} coefficients for {len(autos)} automorphisms")
    if not coeffs:
        raise ValueError("a discrete kernel needs at least one term")
    return DiscreteKernel(tuple(float(a) for a in autos), (1.0,) * len(coeffs), tuple(float(c) for c in coeffs))


def sequence_kernel(
    model: SpaceModel,
    phi: Callable[[int], float],
    auto: Callable[[int], float],
    n_terms: int,
    p: float,
    tail_terms: int = 10_000,
) -> tuple[DiscreteKernel, float]:
    """Truncate a Z+-indexed discrete operator to j < n_terms.

    Also returns the neglected tail sum_{j >= n_terms} |Phi(j)| mod(A(j))^{-1/p},
    summed over the next ``tail_terms`` indices or until the parameters
    leave floating-point range.
    """
    kernel = discrete_kernel([phi(j) for j in range(n_terms)], [auto(j) for j in range(n_terms)])
    expo = 0.0 if math.isinf(p) else -1.0 / p
    tail = 0.0
    for j in range(n_terms, n_terms + tail_terms):
        try:
            term = abs(phi(j))
            if term == 0.0:
                continue
            mod = float(model.modulus(auto(j)))
        except OverflowError:
            break
        if not math.isfinite(mod) or mod == 0.0:
            break
        tail += term * mod**expo
    return kernel, tail


def _cesaro_phi(model: SpaceModel, params):
    mod = np.asarray(model.modulus(params), dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(mod >= 1.0 - CESARO_BOUNDARY_TOL, 1.0 / mod, 0.0)


def cesaro_kernel(model: SpaceModel, base) -> DiscreteKernel | DensityKernel:
    """Replace Phi by the Cesaro weight 1{mod A(u) >= 1} / mod A(u), keeping (Omega, mu)."""
    if isinstance(base, DiscreteKernel):
        phis = _cesaro_phi(model, np.array(base.params))
        return DiscreteKernel(base.params, base.weights, tuple(float(v) for v in phis))
    cuts = tuple(sorted(set(base.breakpoints) | set(model.unit_modulus_params())))
    return DensityKernel(
        base.a,
        base.b,
        phi=lambda u: _cesaro_phi(model, u),
        mu=base.mu,
        nodes=base.nodes,
        breakpoints=cuts,
        phi_src="cesaro",
        mu_src=base.mu_src,
    )


def density_kernel(a: float, b: float, phi: str, mu: str = "1", nodes: int = 64) -> DensityKernel:
    """Density kernel from expression strings in the variable ``u``."""
    phi_f = parse_expression(phi, ["u"])
    mu_f = parse_expression(mu, ["u"])
    return DensityKernel(float(a), float(b), phi=phi_f, mu=mu_f, nodes=int(nodes), phi_src=phi, mu_src=mu)


# --- application ------------------------------------------------------------------


def _coefficients(model, kernel):
    params, w, phi = kernel_terms(model, kernel)
    return params, w * phi


def _orbit_sum(model, kernel, f, x, step):
    params, coeffs = _coefficients(model, kernel)
    x = tuple(np.asarray(c, dtype=float) for c in x)
    total = np.zeros(np.broadcast(*x).shape)
    for u, c in zip(params, coeffs):
        if c == 0.0:
            continue
        with np.errstate(all="ignore"):
            val = np.asarray(f(*step(u, x)), dtype=float)
        if not np.all(np.isfinite(val)):
            raise ValueError(f"non-finite function value along the orbit at parameter u={u:g}")
        total = total + c * val
    return total[()] if total.ndim == 0 else total


def apply(model: SpaceModel, kernel, f: Callable, x) -> np.ndarray | float:
    """Evaluate (H f)(x) at quotient chart point(s) ``x``."""
    return _orbit_sum(model, kernel, f, _as_tuple(x), model.induced_apply)


def apply_group(model: SpaceModel, kernel, g: Callable, x) -> np.ndarray | float:
    """Group-level operator int Phi(u) g(A(u) x) dmu(u) at group chart point(s) ``x``."""
    return _orbit_sum(model, kernel, g, _as_tuple(x), model.auto_apply)


def _as_tuple(x):
    if np.ndim(x) == 0 and not isinstance(x, (tuple, list)):
        return (x,)
    return tuple(x)


def transform(model: SpaceModel, kernel, f: QuotientFunction) -> QuotientFunction:
    """H f as a :class:`QuotientFunction`, carrying box/scale hints pushed through the orbit."""
    params, coeffs = _coefficients(model, kernel)
    live = [(u, c) for u, c in zip(params, coeffs) if c != 0.0]

    def hf(*x):
        return _orbit_sum(model, kernel, f, x, model.induced_apply)

    box = scale = None
    if getattr(f, "box", None) is not None and live:
        boxes = [model.preimage_box(u, f.box) for u, _ in live]
        box = tuple((min(b[i][0] for b in boxes), max(b[i][1] for b in boxes)) for i in range(len(f.box)))
        if f.scale:
            scale = f.scale / max(abs(float(model.quotient_scale(u))) for u, _ in live)
    limit = None
    if getattr(f, "limit", None) is not None:
        limit = f.limit * float(np.sum(coeffs))
    name = f"H[{getattr(f, 'name', '')}]"
    return QuotientFunction(hf, limit=limit, box=box, scale=scale, name=name)


# --- bounds -----------------------------------------------------------------------


def lp_bound(model: SpaceModel, kernel, p: float, empirical: float | None = None, tol: float = 1e-3) -> BoundReport:
    """Lebesgue-space bound ||H|| <= int |Phi| mod(A)^{-1/p} dmu."""
    try:
        bound = phi_norm_pA(model, kernel, p)
        status = "ok"
    except DivergentIntegralError as exc:
        bound, status = math.inf, f"unbounded-hypothesis-violated: {exc}"
    return BoundReport(
        name=f"lp_bound(p={p:g})",
        bound=bound,
        empirical=empirical,
        tol=tol,
        model=model.model_id.value,
        kernel=kernel.describe(),
        status=status,
        extra={"p": p},
    )


def kernel_mass(kernel) -> float:
    """int_Omega Phi dmu."""
    if isinstance(kernel, DiscreteKernel):
        _, w, phi = kernel.discretize()
        return float(np.sum(w * phi))
    return kernel_integral(kernel, lambda u: kernel.phi(u) * kernel.mu(u))


def default_family(model: SpaceModel, seed: int, size: int = 12, box: float = 12.0) -> list[QuotientFunction]:
    """Gaussian bumps with log-uniform widths in [0.1, 10] and uniform centers."""
    rng = rng_for(seed, 11)
    fam = []
    for _ in range(size):
        center = rng.uniform(-box, box, model.quotient_dim)
        width = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
        fam.append(gaussian_bump(center, width, amplitude=float(rng.choice([-1.0, 1.0]))))
    return fam


def empirical_opnorm(
    model: SpaceModel,
    kernel,
    p: float,
    family: Sequence[QuotientFunction] | None = None,
    quad: QuadratureSpec | None = None,
    seed: int = 0,
) -> float:
    """max ||H f||_p / ||f||_p over a test family: a lower bound for the operator norm.

    Without ``quad`` every function gets a grid fitted to its own hints.
    """
    if family is None:
        family = default_family(model, seed)
    if not family:
        raise ValueError("test family is empty")
    best = None
    for f in family:
        nf = lp_norm(model, f, p, quad or fit_quadrature(f, p))
        if nf == 0.0:
            warnings.warn(f"skipping zero-norm test function {getattr(f, 'name', f)}")
            continue
        hf = transform(model, kernel, f)
        if hf.box is None:
            nh = 0.0
        else:
            nh = lp_norm(model, hf, p, quad or fit_quadrature(hf, p))
        best = nh / nf if best is None else max(best, nh / nf)
    if best is None:
        raise ValueError("every test function had zero norm")
    return best


# --- regularity ---------------------------------------------------------------------


def sphere_points(model: SpaceModel, radius: float, n_dirs: int = 16) -> tuple:
    """Quotient chart points at chart norm ``radius``."""
    if model.quotient_dim == 1:
        return (np.array([-radius, radius]),)
    ang = 2.0 * math.pi * np.arange(n_dirs) / n_dirs
    return (radius * np.cos(ang), radius * np.sin(ang))


def regularity_profile(
    model: SpaceModel,
    kernel,
    f: QuotientFunction,
    radii: Sequence[float] = DEFAULT_RADII,
    limit: float | None = None,
) -> list[tuple[float, float]]:
    """(radius, max |H f(x) - l|) over sampled points of each chart sphere.

    ``l`` is ``limit`` if given, else ``f.limit``.
    """
    l = f.limit if limit is None else limit
    if l is None:
        raise ValueError("the function has no declared limit at infinity")
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    out = []
    for r in radii:
        vals = apply(model, kernel, f, sphere_points(model, r))
        out.append((float(r), float(np.max(np.abs(np.asarray(vals) - l)))))
    return out


# --- randomized Lp-bound checks --------------------------------------------------------

_PHI_EXPRS = ("cos(3*u)", "exp(-u^2)", "1/u", "u - 1", "sin(u) + 0.5")
_MU_EXPRS = ("1", "1/abs(u)", "exp(-abs(u))")


def _param_range(model: SpaceModel):
    return (0.25, 4.0) if model.signed_params else (0.5, 2.0)


def random_kernel(model: SpaceModel, rng: np.random.Generator):
    lo, hi = _param_range(model)
    signed = model.signed_params
    if rng.random() < 0.5:
        n = int(rng.integers(1, 5))
        params = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
        if signed:
            params = params * rng.choice([-1.0, 1.0], n)
        weights = rng.uniform(0.2, 1.0, n)
        phis = rng.normal(size=n)
        return DiscreteKernel(tuple(map(float, params)), tuple(map(float, weights)), tuple(map(float, phis)))
    ends = np.sort(np.exp(rng.uniform(math.log(lo), math.log(hi), 2)))
    if ends[1] / ends[0] < 1.2:
        ends[1] = min(hi, ends[0] * 1.5)
        ends[0] = ends[1] / 1.5
    if signed and rng.random() < 0.5:
        ends = -ends[::-1]
    phi = _PHI_EXPRS[int(rng.integers(len(_PHI_EXPRS)))]
    mu = _MU_EXPRS[int(rng.integers(len(_MU_EXPRS)))]
    return density_kernel(float(ends[0]), float(ends[1]), phi, mu, nodes=16)


def random_trial(model: SpaceModel, rng: np.random.Generator, box: float = 12.0):
    """One (kernel, f, p) triple: Gaussian bump with log-uniform width, random sign and p."""
    kernel = random_kernel(model, rng)
    center = rng.uniform(-box, box, model.quotient_dim)
    width = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
    f = gaussian_bump(center, width, amplitude=float(rng.choice([-1.0, 1.0])))
    p = math.inf if rng.random() < 0.2 else float(rng.uniform(1.0, 4.0))
    return kernel, f, p


def lp_bound_trial(model: SpaceModel, kernel, f: QuotientFunction, p: float, tol: float = 1e-3) -> BoundReport:
    """Check ||H f||_p <= ||Phi||_{p,A} ||f||_p for one triple."""
    nf = lp_norm(model, f, p, fit_quadrature(f, p))
    hf = transform(model, kernel, f)
    nh = lp_norm(model, hf, p, fit_quadrature(hf, p)) if hf.box is not None else 0.0
    phi_norm = phi_norm_pA(model, kernel, p)
    return BoundReport(
        name="lp_bound_trial",
        bound=phi_norm * nf,
        empirical=nh,
        tol=tol,
        model=model.model_id.value,
        kernel=kernel.describe(),
        extra={"p": p, "function": f.name, "phi_norm": phi_norm, "f_norm": nf},
    )


def lp_bound_fuzz(model: SpaceModel, trials: int, seed: int, tol: float = 1e-3) -> list[BoundReport]:
    rng = rng_for(seed, 12)
    reports = []
    for i in range(trials):
        kernel, f, p = random_trial(model, rng)
        rep = lp_bound_trial(model, kernel, f, p, tol)
        rep.seed = seed
        rep.extra["trial"] = i
        reports.append(rep)
    return reports
