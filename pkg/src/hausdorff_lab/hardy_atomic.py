"""Atoms, atomic decompositions and H^1 bounds on G/K.

An atom is a function on G supported in a ball B, bounded by 1/nu(B) and
with vanishing Haar integral.  Functions on G/K are handled through their
right-K-invariant lifts, so every object here lives on the group chart.

H^1 norms are never computed exactly: :func:`h1_upper` gives the coefficient
mass of one decomposition and :func:`l1_lower` the L^1 norm, which bracket
the true norm from above and below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hausdorff_op import BoundReport, apply
from .homogeneous_models import SpaceModel, centered_angle, k_nodes
from .numerics import (
    DiscreteKernel,
    DivergentIntegralError,
    QuadratureSpec,
    kernel_integral,
    kernel_terms,
    lipschitz_estimate,
    lp_norm,
    rng_for,
    tensor_rule,
)

VERIFY_NODES = {1: 4096, 2: 512, 3: 96}
QUOTIENT_VERIFY_NODES = {1: 4096, 2: 256}
SUPPORT_WINDOW = 1.5


class AtomError(ValueError):
    """A candidate failed one of the atom axioms."""

    def __init__(self, message: str, report: "AtomReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")


@dataclass(frozen=True)
class AtomCandidate:
    """A function on G with a declared supporting ball."""

    func: Callable
    ball: Ball
    k_invariant: bool = False
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, *x):
        return self.func(*x)


@dataclass
class AtomReport:
    support_residual: float
    sup_value: float
    ball_volume: float
    sup_excess: float
    integral_residual: float
    tol: float

    @property
    def failed(self) -> list[str]:
        out = []
        if not self.support_residual <= self.tol:
            out.append("support")
        if not self.sup_excess <= self.tol:
            out.append("sup")
        if not self.integral_residual <= self.tol:
            out.append("integral")
        return out

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {
            "support_residual": self.support_residual,
            "sup_value": self.sup_value,
            "ball_volume": self.ball_volume,
            "sup_excess": self.sup_excess,
            "integral_residual": self.integral_residual,
            "tol": self.tol,
            "failed": self.failed,
            "passed": self.passed,
        }


@dataclass
class AtomicDecomposition:
    """g = sum_j alpha_j a_j; an empty list represents the zero function."""

    terms: list[tuple[float, AtomCandidate]] = field(default_factory=list)

    def __call__(self, *x):
        x = tuple(np.asarray(c, dtype=float) for c in x)
        total = np.zeros(np.broadcast(*x).shape)
        for alpha, atom in self.terms:
            total = total + alpha * np.asarray(atom(*x), dtype=float)
        return total

    def __len__(self):
        return len(self.terms)


# --- verification -------------------------------------------------------------------


def _local_box(model: SpaceModel, r: float, angular: Sequence[bool]):
    box = []
    for ang in angular:
        half = SUPPORT_WINDOW * r
        box.append((-math.pi, math.pi) if ang and half >= math.pi else (-half, half))
    return tuple(box)


def verify_atom(model: SpaceModel, cand: AtomCandidate, tol: float = 1e-6, nodes: int | None = None, k_nodes_count: int = 64) -> AtomReport:
    """Residuals of the three atom axioms on a grid centred on the declared ball.

    The grid covers 1.5 times the ball in each chart direction and is
    symmetric about the centre.  Right-K-invariant candidates are integrated
    over G/K (Weil's formula) with the support test averaged over K.
    """
    center, r = tuple(float(c) for c in cand.ball.center), cand.ball.radius
    vol = float(model.ball_volume(r))
    if cand.k_invariant and not model.has_trivial_k:
        support, sup, integral = _verify_quotient(model, cand, center, r, nodes, k_nodes_count)
    else:
        support, sup, integral = _verify_group(model, cand, center, r, nodes)
    return AtomReport(
        support_residual=support,
        sup_value=sup,
        ball_volume=vol,
        sup_excess=max(0.0, sup * vol - 1.0),
        integral_residual=abs(integral),
        tol=tol,
    )


def _weights_outer(weights):
    w = weights[0]
    for extra in weights[1:]:
        w = np.multiply.outer(w, extra)
    return w


def _verify_group(model, cand, center, r, nodes):
    n = nodes or VERIFY_NODES[model.group_dim]
    quad = QuadratureSpec(box=_local_box(model, r, model.angular), nodes=n)
    y, weights = tensor_rule(quad, model.angular)
    x = model.group_mul(center, y)
    shape = tuple(len(np.ravel(g)) for g in y)
    vals = np.broadcast_to(np.asarray(cand(*x), dtype=float), shape)
    w = _weights_outer(weights) * model.haar_density
    outside = np.broadcast_to(model.dist(center, x) >= r, shape)
    support = float(np.sum(np.abs(vals) * w * outside))
    return support, float(np.max(np.abs(vals))), float(np.sum(vals * w))


def _verify_quotient(model, cand, center, r, nodes, kn):
    qc = model.project(center)
    n = nodes or QUOTIENT_VERIFY_NODES[model.quotient_dim]
    qang = (False,) * model.quotient_dim
    box = tuple((float(c) + lo, float(c) + hi) for c, (lo, hi) in zip(qc, _local_box(model, r, qang)))
    q, weights = tensor_rule(QuadratureSpec(box=box, nodes=n), qang)
    shape = tuple(len(np.ravel(g)) for g in q)
    reps = model.section(q)
    vals = np.broadcast_to(np.asarray(cand(*reps), dtype=float), shape)
    w = _weights_outer(weights)
    ks = model.k_element(k_nodes(kn))
    pts = model.group_mul(tuple(np.asarray(c)[..., None] for c in reps), ks)
    frac_out = np.mean(model.dist(center, pts) >= r, axis=-1)
    support = float(np.sum(np.abs(vals) * w * frac_out))
    return support, float(np.max(np.abs(vals))), float(np.sum(vals * w))


# --- construction -------------------------------------------------------------------


def local_coords(model: SpaceModel, center, x) -> tuple:
    """center^{-1} x with angular coordinates in [-pi, pi)."""
    y = model.group_mul(model.group_inv(center), x)
    return tuple(centered_angle(c) if ang else c for c, ang in zip(y, model.angular))


def make_haar_atom(model: SpaceModel, ball: Ball, orientation: Sequence[float] | None = None, collar: float = 1e-3) -> AtomCandidate:
    """Two-sign atom: +-1/nu(B) on the halves of B cut by the hyperplane normal to ``orientation``.

    The outer edge tapers to zero across a ``collar * r`` band inside the ball.
    """
    center = tuple(float(c) for c in ball.center)
    n = np.zeros(model.group_dim) if orientation is None else np.asarray(orientation, dtype=float)
    if orientation is None:
        n[0] = 1.0
    if n.shape != (model.group_dim,) or not np.linalg.norm(n) > 0:
        raise ValueError(f"orientation must be a nonzero vector of length {model.group_dim}")
    n = n / np.linalg.norm(n)
    r = ball.radius
    height = 1.0 / float(model.ball_volume(r))
    inner = r * (1.0 - collar)

    def atom(*x):
        y = local_coords(model, center, x)
        side = np.sign(sum(ni * yi for ni, yi in zip(n, y)))
        d = model.dist(center, x)
        s = np.clip((r - d) / (r - inner), 0.0, 1.0)
        taper = s * s * (3.0 - 2.0 * s)
        return height * side * taper

    return AtomCandidate(atom, Ball(center, r), k_invariant=model.has_trivial_k, name=f"haar(r={r:g})", meta={"orientation": n.tolist()})


def k_average_atom(model: SpaceModel, a: AtomCandidate, k_nodes_count: int = 64) -> AtomCandidate:
    """a'(x) = c int_K a(xk) dk with c = nu(B)/nu(B'), B' = B(center, r + R_K).

    R_K = sup_k rho(e, k).  The average is taken at the coset representative
    carrying the centre's K-component, which keeps the quadrature nodes
    symmetric about the atom and the result exactly right-K-invariant.
    """
    if model.has_trivial_k:
        return AtomCandidate(a.func, a.ball, True, a.name, {**a.meta, "c": 1.0, "R_K": 0.0})
    center, r = tuple(float(v) for v in a.ball.center), a.ball.radius
    r_new = r + model.k_radius
    c = float(model.ball_volume(r) / model.ball_volume(r_new))
    kc = model.k_part(center)

    def averaged(*x):
        rep = model.group_mul(model.section(model.project(x)), kc)
        return c * model.k_average(a, rep, nodes=k_nodes_count)

    return AtomCandidate(
        averaged,
        Ball(center, r_new),
        k_invariant=True,
        name=f"kavg[{a.name}]",
        meta={**a.meta, "c": c, "R_K": model.k_radius, "R_K_reading": "sup_k rho(e,k)"},
    )


# --- pushforward under automorphisms -------------------------------------------------


def containment_holds(model: SpaceModel, param: float, k: float, n: int = 4000, seed: int = 0) -> bool:
    """Sampled test of A^{-1} B(x, r) inside B(A^{-1} x, k r)."""
    rng = rng_for(seed, 21)
    inv = model.inverse_param(param)
    x = model.random_points(rng, n)
    r = np.exp(rng.uniform(math.log(1e-2), math.log(5.0), n))
    z = []
    along = rng.integers(0, model.group_dim, n)
    for i, ang in enumerate(model.angular):
        step = rng.uniform(-1.0, 1.0, n) * r
        axis_step = np.where(along == i, rng.choice([-1.0, 1.0], n) * r * (1 - 1e-9), 0.0)
        step = np.where(np.arange(n) % 2 == 0, step, axis_step)
        z.append(np.clip(step, -math.pi + 1e-9, math.pi - 1e-9) if ang else step)
    z = tuple(z)
    inside = model.norm(z) < r
    y = model.group_mul(x, z)
    d = model.dist(model.auto_apply(inv, x), model.auto_apply(inv, y))
    return bool(np.all(d[inside] <= k * r[inside] * (1.0 + 1e-9)))


def resolve_k(model: SpaceModel, param: float, seed: int = 0) -> tuple[float, str]:
    """Dilation factor for supporting balls under A(param)^{-1}.

    Primary value kappa / mod A; when the sampled containment fails, the
    measured Lipschitz constant of A^{-1} is used instead.
    """
    k = model.kappa / float(model.modulus(param))
    if containment_holds(model, param, k, seed=seed):
        return k, "kappa/mod"
    measured = lipschitz_estimate(model, float(model.inverse_param(param)), seed=seed)
    return measured, "measured-lipschitz"


def pushforward_atom(
    model: SpaceModel,
    a: AtomCandidate,
    param: float,
    seed: int = 0,
    verify: bool = True,
    tol: float = 1e-6,
    k: float | None = None,
) -> tuple[AtomCandidate, float]:
    """b = (C_nu k^s)^{-1} a o A(param) on B(A^{-1}(center), k r); returns (b, C_nu k^s).

    ``k`` defaults to :func:`resolve_k`; passing it explicitly skips the
    containment test, so a wrong value surfaces as an :class:`AtomError`.
    """
    model.check_param(param)
    if k is None:
        k, source = resolve_k(model, param, seed)
    else:
        source = "given"
    scale = model.doubling_constant * k**model.dimension
    inv = model.inverse_param(param)
    center = tuple(float(c) for c in model.auto_apply(inv, tuple(a.ball.center)))

    def b(*x):
        return a(*model.auto_apply(param, x)) / scale

    atom = AtomCandidate(
        b,
        Ball(center, k * a.ball.radius),
        k_invariant=a.k_invariant,
        name=f"push[{a.name}, u={param:g}]",
        meta={**a.meta, "k": k, "k_source": source, "param": float(param), "scale": scale},
    )
    if verify:
        rep = verify_atom(model, atom, tol)
        atom.meta["report"] = rep.to_dict()
        if not rep.passed:
            raise AtomError(f"pushforward under u={param:g} fails axiom(s) {rep.failed} (k from {source})", rep)
    return atom, scale


def as_discrete(model: SpaceModel, kernel) -> DiscreteKernel:
    """Discrete kernel with the same applied terms (density kernels via their Gauss-Legendre nodes)."""
    if isinstance(kernel, DiscreteKernel):
        return kernel
    params, w, phi = kernel_terms(model, kernel)
    return DiscreteKernel(tuple(map(float, params)), tuple(map(float, w)), tuple(map(float, phi)))


def apply_to_decomposition(
    model: SpaceModel, kernel, decomp: AtomicDecomposition, seed: int = 0, verify: bool = True
) -> AtomicDecomposition:
    """Transport g = sum alpha_j a_j through H: entries (Phi(u) w_u C_nu k(u)^s alpha_j, b_{j,u}).

    Ordered by (u index, j index).  Raises :class:`AtomError` naming (u, j) if
    a pushforward fails.
    """
    kernel = as_discrete(model, kernel)
    terms = []
    for iu, (u, w, phi) in enumerate(zip(kernel.params, kernel.weights, kernel.phis)):
        if phi * w == 0.0:
            continue
        for j, (alpha, atom) in enumerate(decomp.terms):
            try:
                b, scale = pushforward_atom(model, atom, u, seed=seed, verify=verify)
            except AtomError as exc:
                raise AtomError(f"(u index {iu}, atom {j}): {exc}", exc.report) from None
            terms.append((phi * w * scale * alpha, b))
    return AtomicDecomposition(terms)


def h1_upper(decomp: AtomicDecomposition) -> float:
    """sum |alpha_j| of one decomposition: an upper bound for the H^1 norm."""
    return float(sum(abs(alpha) for alpha, _ in decomp.terms))


def l1_lower(model: SpaceModel, f: Callable, quad: QuadratureSpec | None = None) -> float:
    """||f||_{L^1(G/K)}: a lower bound for the H^1 norm."""
    return lp_norm(model, f, 1.0, quad)


def quotient_view(model: SpaceModel, g: Callable) -> Callable:
    """The function on G/K induced by a right-K-invariant g."""
    return lambda *q: g(*model.section(q))


def h1_bound(
    model: SpaceModel,
    kernel,
    corpus: Sequence[AtomicDecomposition] = (),
    seed: int = 0,
    tol: float = 1e-6,
) -> BoundReport:
    """C_nu int |Phi(u)| k(u)^s dmu(u), with the transported-mass ratio over ``corpus`` as empirical value."""
    C, s = model.doubling_constant, model.dimension
    sources: dict[str, int] = {}
    status = "ok"
    try:
        if isinstance(kernel, DiscreteKernel):
            total = 0.0
            for u, w, phi in zip(kernel.params, kernel.weights, kernel.phis):
                k, src = resolve_k(model, u, seed)
                sources[src] = sources.get(src, 0) + 1
                total += w * abs(phi) * k**s
            bound = C * total
        else:
            params, w, phi = kernel_terms(model, kernel)
            resolved = [resolve_k(model, u, seed) for u in params]
            for _, src in resolved:
                sources[src] = sources.get(src, 0) + 1
            if all(src == "kappa/mod" for _, src in resolved):
                bound = C * model.kappa**s * kernel_integral(
                    kernel, lambda u: abs(kernel.phi(u)) * kernel.mu(u) * float(model.modulus(u)) ** (-s)
                )
            else:
                ks = np.array([k for k, _ in resolved])
                bound = C * float(np.sum(w * np.abs(phi) * ks**s))
    except DivergentIntegralError as exc:
        bound, status = math.inf, f"unbounded-hypothesis-violated: {exc}"
    empirical = None
    if corpus and status == "ok":
        ratios = []
        for d in corpus:
            base = h1_upper(d)
            if base > 0:
                ratios.append(h1_upper(apply_to_decomposition(model, kernel, d, seed=seed)) / base)
        empirical = max(ratios) if ratios else None
    return BoundReport(
        name="h1_bound",
        bound=bound,
        empirical=empirical,
        tol=tol,
        model=model.model_id.value,
        kernel=kernel.describe(),
        seed=seed,
        status=status,
        extra={"C_nu": C, "s": s, "kappa_rho": model.kappa, "k_sources": sources},
    )


def discrete_h1_formula(model: SpaceModel, kernel: DiscreteKernel) -> float:
    """C_nu kappa^s sum_j w_j |Phi(j)| / mod(A(j))^s."""
    C, s = model.doubling_constant, model.dimension
    params, w, phi = kernel.discretize()
    return float(C * model.kappa**s * np.sum(w * np.abs(phi) / model.modulus(params) ** s))


def cesaro_h1_formula(model: SpaceModel, base) -> float:
    """C_nu kappa^s int_{mod A >= 1} mod(A(u))^{-(1+s)} dmu(u) for a base (Omega, mu)."""
    C, s = model.doubling_constant, model.dimension
    if isinstance(base, DiscreteKernel):
        params, w, _ = base.discretize()
        mod = model.modulus(params)
        return float(C * model.kappa**s * np.sum(np.where(mod >= 1.0 - 1e-9, w * mod ** (-(1 + s)), 0.0)))
    from dataclasses import replace

    split = replace(base, breakpoints=tuple(base.breakpoints) + model.unit_modulus_params())

    def integrand(u):
        mod = float(model.modulus(u))
        return base.mu(u) * mod ** (-(1 + s)) if mod >= 1.0 - 1e-9 else 0.0

    return C * model.kappa**s * kernel_integral(split, integrand)


# --- corpora ---------------------------------------------------------------------------


def random_ball(model: SpaceModel, rng, r_lo: float = 0.2, r_hi: float = 2.0, spread: float = 3.0) -> Ball:
    center = tuple(float(c[0]) for c in model.random_points(rng, 1, scale=spread))
    return Ball(center, float(math.exp(rng.uniform(math.log(r_lo), math.log(r_hi)))))


def atom_corpus(model: SpaceModel, n: int, seed: int = 0) -> list[AtomCandidate]:
    """Haar atoms on random balls with random orientations."""
    rng = rng_for(seed, 31)
    out = []
    for _ in range(n):
        ball = random_ball(model, rng)
        out.append(make_haar_atom(model, ball, rng.normal(size=model.group_dim)))
    return out


def atoms_from_entries(model: SpaceModel, entries: Sequence[dict]) -> list[AtomCandidate]:
    """Atoms from corpus-file entries ``{"center": [...], "radius": r, "orientation": [...]}``."""
    out = []
    for e in entries:
        center = tuple(float(c) for c in np.atleast_1d(e["center"]))
        if len(center) != model.group_dim:
            raise ValueError(f"center {center} does not match the {model.group_dim}-dimensional group chart")
        out.append(make_haar_atom(model, Ball(center, float(e["radius"])), e.get("orientation")))
    return out


def constructed_violations(model: SpaceModel, seed: int = 0) -> list[tuple[AtomCandidate, str]]:
    """Ten candidates, each breaking exactly one axiom; paired with the axiom name."""
    rng = rng_for(seed, 32)
    out = []
    for scale in (1.01, 1.5, 2.0, 3.0):
        a = make_haar_atom(model, random_ball(model, rng), rng.normal(size=model.group_dim))
        out.append((AtomCandidate(lambda *x, a=a, s=scale: s * a(*x), a.ball, a.k_invariant, f"{scale}x"), "sup"))
    for shrink in (0.5, 0.8, 0.95):
        a = make_haar_atom(model, random_ball(model, rng), rng.normal(size=model.group_dim))
        out.append((AtomCandidate(a.func, Ball(a.ball.center, shrink * a.ball.radius), a.k_invariant, "small-ball"), "support"))
    for tilt in (0.2, 0.5, 0.9):
        a = make_haar_atom(model, random_ball(model, rng), rng.normal(size=model.group_dim))

        def lopsided(*x, a=a, t=tilt):
            v = a(*x)
            return np.where(v < 0, (1.0 - t) * v, v)

        out.append((AtomCandidate(lopsided, a.ball, a.k_invariant, f"lopsided({tilt})"), "integral"))
    return out


def transported_matches(model: SpaceModel, kernel, decomp: AtomicDecomposition, transported: AtomicDecomposition, n: int = 1000, seed: int = 0) -> float:
    """Max |re-expansion - H applied directly| over sampled quotient points."""
    rng = rng_for(seed, 33)
    centers = [t[1].ball for t in decomp.terms]
    spread = max((max(abs(float(c)) for c in b.center) + 2 * b.radius) for b in centers) if centers else 1.0
    q = tuple(rng.uniform(-spread, spread, n) for _ in range(model.quotient_dim))
    direct = apply(model, as_discrete(model, kernel), quotient_view(model, decomp), q)
    reexp = transported(*model.section(q)) if transported.terms else np.zeros(n)
    return float(np.max(np.abs(np.asarray(reexp) - np.asarray(direct))))
