"""Verification suites behind the command-line subcommands.

Each suite takes a :class:`RunConfig` and returns a :class:`Report` listing
every check, including failures.  Input files are parsed here; malformed
input raises :class:`InputError`, which the CLI maps to exit code 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .expressions import ExpressionError, compile_quotient
from .hardy_atomic import (
    AtomError,
    AtomicDecomposition,
    as_discrete,
    atom_corpus,
    atoms_from_entries,
    constructed_violations,
    h1_bound,
    h1_upper,
    k_average_atom,
    l1_lower,
    quotient_view,
    transported_matches,
    apply_to_decomposition,
    verify_atom,
)
from .hausdorff_op import (
    discrete_kernel,
    density_kernel,
    empirical_opnorm,
    default_family,
    kernel_mass,
    lp_bound,
    regularity_profile,
    lp_bound_fuzz,
)
from .homogeneous_models import ModelId, SpaceModel, make_model
from .numerics import (
    DEFAULT_MC_SAMPLES,
    DiscreteKernel,
    QuadratureSpec,
    QuotientFunction,
    check_kernel,
    constant,
    doubling_estimate,
    gaussian_bump,
    kernel_terms,
    lipschitz_estimate,
    modular_estimate,
    resolved_modulus,
    rng_for,
    smooth_bump,
    smoothed_indicator,
    weil_residual,
)
from .report import Check, Report

ALL_MODELS = tuple(m.value for m in ModelId)


class InputError(ValueError):
    """Unreadable or malformed input (files, flags)."""


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    kernel: str | None = None
    function: str | None = None
    corpus: str = "default"
    p: float | None = None
    seed: int = 0
    nodes: int | None = None
    mc_samples: int | None = None
    box: float | None = None
    tol: float | None = None
    trials: int | None = None
    params: list[float] = field(default_factory=list)
    out: str | None = None
    fmt: str = "json"
    timing: bool = False

    def validate(self) -> None:
        for label, path in (("kernel", self.kernel), ("function", self.function)):
            if path is not None and not Path(path).is_file():
                raise InputError(f"{label} file not found: {path}")
        if self.corpus != "default" and not Path(self.corpus).is_file():
            raise InputError(f"corpus file not found: {self.corpus}")
        if self.model is not None:
            try:
                make_model(self.model)
            except ValueError as exc:
                raise InputError(str(exc)) from None
        if self.out is not None and self.out != "-" and not Path(self.out).resolve().parent.is_dir():
            raise InputError(f"output directory does not exist: {Path(self.out).parent}")

    def echo(self) -> dict:
        data = asdict(self)
        data.pop("timing")
        data.pop("out")
        return data


# --- input files ---------------------------------------------------------------------


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{where}: field {key!r} must be a number")
    return float(v)


def parse_kernel(data, model: SpaceModel):
    """Kernel from its JSON object (discrete points or density on [a, b])."""
    if not isinstance(data, dict) or data.get("type") not in ("discrete", "density"):
        raise InputError('kernel must be an object with "type" "discrete" or "density"')
    try:
        if data["type"] == "discrete":
            pts = data.get("points")
            if not isinstance(pts, list) or not pts:
                raise InputError('discrete kernel needs a nonempty "points" list')
            rows = []
            for i, pt in enumerate(pts):
                if not isinstance(pt, dict):
                    raise InputError(f"points[{i}] must be an object")
                rows.append(tuple(_number(pt, k, f"points[{i}]") for k in ("param", "weight", "phi")))
            params, weights, phis = zip(*rows)
            kernel = DiscreteKernel(params, weights, phis)
        else:
            a, b = _number(data, "a", "kernel"), _number(data, "b", "kernel")
            nodes = data.get("nodes", 64)
            if isinstance(nodes, bool) or not isinstance(nodes, int):
                raise InputError('"nodes" must be an integer')
            for key in ("phi", "mu"):
                if not isinstance(data.get(key, "1"), str):
                    raise InputError(f'"{key}" must be an expression string')
            if "phi" not in data:
                raise InputError('density kernel needs a "phi" expression')
            kernel = density_kernel(a, b, data["phi"], data.get("mu", "1"), nodes)
        check_kernel(model, kernel)
    except ExpressionError as exc:
        raise InputError(f"kernel expression: {exc}") from None
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"invalid kernel: {exc}") from None
    return kernel


def load_kernel(path: str, model: SpaceModel):
    return parse_kernel(_read_json(path), model)


_FAMILIES = {
    "gaussian": lambda d, c: gaussian_bump(c, _number(d, "width", "function"), d.get("amplitude", 1.0), d.get("offset", 0.0)),
    "bump": lambda d, c: smooth_bump(c, _number(d, "radius", "function"), d.get("amplitude", 1.0), d.get("offset", 0.0)),
    "indicator": lambda d, c: smoothed_indicator(c, _number(d, "radius", "function"), _number(d, "edge", "function"), d.get("amplitude", 1.0)),
}


def parse_function(data, model: SpaceModel) -> QuotientFunction:
    """``{"expr": ..., "limit": l}`` or ``{"family": name, "center": [...], ...}``; ``{"constant": l}`` also works."""
    if not isinstance(data, dict):
        raise InputError("function file must hold a JSON object")
    if "constant" in data:
        return constant(_number(data, "constant", "function"))
    if "family" in data:
        fam = _FAMILIES.get(data["family"])
        if fam is None:
            raise InputError(f"unknown function family {data['family']!r}; choose from {sorted(_FAMILIES)}")
        center = np.atleast_1d(np.asarray(data.get("center", [0.0] * model.quotient_dim), dtype=float))
        if center.shape != (model.quotient_dim,):
            raise InputError(f"center must have {model.quotient_dim} coordinate(s)")
        try:
            return fam(data, center)
        except (TypeError, ValueError) as exc:
            raise InputError(f"function parameters: {exc}") from None
    if "expr" not in data or not isinstance(data["expr"], str):
        raise InputError('function needs "expr" (string), "family" or "constant"')
    try:
        fn = compile_quotient(data["expr"], model)
    except ExpressionError as exc:
        raise InputError(f"function expression: {exc}") from None
    limit = data.get("limit")
    if limit is not None:
        limit = _number(data, "limit", "function")
    return QuotientFunction(fn, limit=limit, name=data["expr"])


def load_function(path: str, model: SpaceModel) -> QuotientFunction:
    return parse_function(_read_json(path), model)


def load_corpus(path: str, model: SpaceModel):
    data = _read_json(path)
    if not isinstance(data, list) or not data:
        raise InputError("atom corpus must be a nonempty JSON list")
    try:
        return atoms_from_entries(model, data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"atom corpus entry: {exc}") from None


# --- helpers -----------------------------------------------------------------------


def _models(cfg: RunConfig, default=ALL_MODELS) -> list[SpaceModel]:
    return [make_model(m) for m in ([cfg.model] if cfg.model else default)]


def _require_model(cfg: RunConfig) -> SpaceModel:
    if cfg.model is None:
        raise InputError(f"{cfg.command} needs --model")
    return make_model(cfg.model)


def _tol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


def constants_for(model: SpaceModel) -> dict:
    return {
        "C_nu": {"value": model.doubling_constant, "source": "analytic"},
        "s": {"value": model.dimension, "source": "analytic"},
        "kappa_rho": {"value": model.kappa, "source": "configured"},
        "R_K": {"value": model.k_radius, "source": "analytic", "reading": "sup_k rho(e,k)"},
        "modular_function": {"value": model.modular_value, "source": "analytic"},
    }


def _new_report(cfg: RunConfig, models: list[SpaceModel]) -> Report:
    return Report(command=cfg.command, config=cfg.echo(), constants={m.model_id.value: constants_for(m) for m in models})


def _finite(x) -> float | None:
    return None if x is None else float(x)


# --- model info ------------------------------------------------------------------------


def suite_model_info(cfg: RunConfig) -> Report:
    """Structural sanity of each model: group law, metric invariance, automorphisms."""
    models = _models(cfg)
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-9)
    n = cfg.trials or 1000
    for m in models:
        rng = rng_for(cfg.seed, 1)
        x, y, z = (m.random_points(rng, n) for _ in range(3))
        a, b = m.random_params(rng, n), m.random_params(rng, n)
        e = m.identity()
        res = {
            "associativity": m.dist(m.group_mul(m.group_mul(x, y), z), m.group_mul(x, m.group_mul(y, z))),
            "inverse": m.dist(m.group_mul(x, m.group_inv(x)), e),
            "left_invariant_metric": np.abs(m.dist(m.group_mul(z, x), m.group_mul(z, y)) - m.dist(x, y)),
            "automorphism_homomorphism": m.dist(m.auto_apply(a, m.group_mul(x, y)), m.group_mul(m.auto_apply(a, x), m.auto_apply(a, y))),
            "automorphism_composition": m.dist(m.auto_apply(a, m.auto_apply(b, x)), m.auto_apply(m.compose_params(a, b), x)),
            "automorphism_preserves_K": m.norm(m.section(m.project(m.auto_apply(a, m.k_element(rng.uniform(0, 2 * math.pi, n)))))),
        }
        for name, vals in res.items():
            worst = float(np.max(vals)) / max(1.0, float(np.max(m.norm(x))))
            rep.add(Check(f"{m.model_id.value}:{name}", worst <= tol, residuals={"max_rel": worst}, provenance={"max_rel": "sampled"}, detail={"samples": n, "tol": tol}))
        rep.constants[m.model_id.value]["info"] = m.info()
    return rep


# --- verify weil ---------------------------------------------------------------------


def weil_corpus(model: SpaceModel, seed: int, size: int = 10) -> list[Callable]:
    """Smooth functions on G: Gaussians in the linear chart axes times a trigonometric factor in the angle."""
    rng = rng_for(seed, 41)
    lin = [i for i, ang in enumerate(model.angular) if not ang]
    out = []
    for _ in range(size):
        c = rng.uniform(-2.0, 2.0, len(lin))
        w = float(rng.uniform(0.5, 1.5))
        amp, freq, phase = float(rng.uniform(0.0, 0.9)), int(rng.integers(1, 4)), float(rng.uniform(0, 2 * math.pi))

        def g(*x, c=c, w=w, amp=amp, freq=freq, phase=phase):
            r2 = sum((x[i] - ci) ** 2 for i, ci in zip(lin, c))
            ang = sum(np.cos(freq * x[i] + phase) for i, a in enumerate(model.angular) if a)
            return np.exp(-r2 / w**2) * (1.0 + amp * ang)

        out.append(g)
    return out


def suite_weil(cfg: RunConfig) -> Report:
    models = _models(cfg, (ModelId.COMPLEX_MOD_CIRCLE.value, ModelId.MOTION_GROUP_PLANE.value))
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-6)
    for m in models:
        quad = QuadratureSpec(box=cfg.box or 12.0, nodes=cfg.nodes)
        for i, g in enumerate(weil_corpus(m, cfg.seed, cfg.trials or 10)):
            r = weil_residual(m, g, quad)
            rep.add(Check(f"{m.model_id.value}:weil[{i}]", r < tol, residuals={"weil": r}, provenance={"weil": "quadrature"}, detail={"tol": tol}))
    return rep


# --- verify lp ------------------------------------------------------------------------


def point_mass_cases(model: SpaceModel, seed: int, n: int = 10):
    rng = rng_for(seed, 42)
    out = []
    for _ in range(n):
        u = float(model.random_params(rng, 1, lo=0.25, hi=4.0)[0])
        phi0 = float(rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0]))
        p = float(rng.uniform(1.0, 4.0))
        out.append((DiscreteKernel((u,), (1.0,), (phi0,)), p))
    return out


def suite_lp(cfg: RunConfig) -> Report:
    """Randomized Lebesgue-bound fuzz plus point-mass sharpness."""
    models = _models(cfg)
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-3)
    for m in models:
        mid = m.model_id.value
        for r in lp_bound_fuzz(m, cfg.trials or 100, cfg.seed, tol):
            rep.add(Check(
                f"{mid}:lp_bound_fuzz[{r.extra['trial']}]", r.passed, bound=r.bound, empirical=r.empirical,
                residuals={"ratio": r.ratio}, provenance={"bound": "analytic*quadrature", "empirical": "quadrature"},
                detail={"p": r.extra["p"], "kernel": r.kernel, "function": r.extra["function"], "tol": tol},
            ))
        for i, (kernel, p) in enumerate(point_mass_cases(m, cfg.seed)):
            exact = abs(kernel.phis[0]) * float(m.modulus(kernel.params[0])) ** (-1.0 / p)
            emp = empirical_opnorm(m, kernel, p, default_family(m, cfg.seed, size=3))
            err = abs(emp - exact) / exact
            rep.add(Check(
                f"{mid}:point_mass_sharpness[{i}]", err <= tol, bound=exact, empirical=emp,
                residuals={"rel_err": err}, provenance={"bound": "analytic", "empirical": "quadrature"},
                detail={"p": p, "kernel": kernel.describe(), "tol": tol},
            ))
    return rep


# --- verify regularity ---------------------------------------------------------------------


def default_regularity_kernels(model: SpaceModel) -> list[DiscreteKernel]:
    """A mass-1 and a mass-1/2 two-point average over the identity and a dilation by 2."""
    return [discrete_kernel([0.5, 0.5], [1.0, 2.0]), discrete_kernel([0.5], [2.0])]


def _applied_mass(model: SpaceModel, kernel) -> float:
    _, w, phi = kernel_terms(model, kernel)
    return float(np.sum(w * phi))


def suite_regularity(cfg: RunConfig) -> Report:
    models = _models(cfg)
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-12)
    for m in models:
        mid = m.model_id.value
        kernels = [load_kernel(cfg.kernel, m)] if cfg.kernel else default_regularity_kernels(m)
        user_f = load_function(cfg.function, m) if cfg.function else None
        for ki, kernel in enumerate(kernels):
            mass = _applied_mass(m, kernel)
            mass_q = kernel_mass(kernel)
            for l in (5.0, -2.0, 0.5, 0.0):
                prof = regularity_profile(m, kernel, constant(l))
                expect = abs(l) * abs(mass - 1.0)
                err = max(abs(d - expect) for _, d in prof)
                rep.add(Check(
                    f"{mid}:constant_level[k{ki}, l={l:g}]", err <= tol * max(1.0, abs(l)), bound=expect,
                    empirical=max(d for _, d in prof), residuals={"abs_err": err},
                    provenance={"bound": "analytic", "empirical": "exact-sum"},
                    detail={"kernel_mass": mass, "kernel_mass_quad": mass_q, "profile": prof},
                ))
            unit = abs(mass - 1.0) <= 1e-9
            if user_f is not None:
                prof = regularity_profile(m, kernel, user_f)
                first, last = prof[0][1], prof[-1][1]
                if unit:
                    ok = last <= first * (1 + 1e-9) + 1e-12
                    claim = "mass 1: deviation should not grow"
                else:
                    ok = user_f.limit == 0 or last >= 0.5 * abs(user_f.limit) * abs(mass - 1.0)
                    claim = "mass != 1: limit should not be preserved"
                rep.add(Check(f"{mid}:user_function[k{ki}]", ok, residuals={"first": first, "last": last},
                              provenance={"profile": "exact-sum"}, detail={"claim": claim, "kernel_mass": mass, "profile": prof}))
            elif unit:
                rng = rng_for(cfg.seed, 43)
                for j in range(cfg.trials or 5):
                    c = rng.uniform(-2.0, 2.0, m.quotient_dim)
                    f = gaussian_bump(c, float(rng.uniform(0.3, 2.0)), float(rng.choice([-1.0, 1.0])), float(rng.uniform(-3, 3)))
                    prof = regularity_profile(m, kernel, f)
                    first, last = prof[0][1], prof[-1][1]
                    rep.add(Check(
                        f"{mid}:decay[k{ki}, f{j}]", last <= 1e-6 * first, residuals={"radius_1": first, "radius_64": last},
                        provenance={"profile": "exact-sum"}, detail={"function": f.name, "profile": prof},
                    ))
    return rep


# --- verify atoms / h1 -------------------------------------------------------------------------


def _atoms(cfg: RunConfig, model: SpaceModel, n: int):
    if cfg.corpus != "default":
        return load_corpus(cfg.corpus, model)
    return atom_corpus(model, n, seed=cfg.seed)


def _atom_check(name: str, rep_atom, extra=None, passed: bool | None = None) -> Check:
    d = rep_atom.to_dict()
    return Check(
        name, rep_atom.passed if passed is None else passed,
        residuals={k: d[k] for k in ("support_residual", "sup_excess", "integral_residual")},
        provenance={"residuals": "quadrature", "ball_volume": "analytic"},
        detail={"failed": d["failed"], "sup_value": d["sup_value"], "ball_volume": d["ball_volume"], "tol": d["tol"], **(extra or {})},
    )


def k_invariance_residual(model: SpaceModel, a, n: int = 500, seed: int = 0) -> float:
    rng = rng_for(seed, 44)
    c = np.asarray(a.ball.center, dtype=float)
    x = tuple(ci + rng.uniform(-a.ball.radius, a.ball.radius, n) for ci in c)
    k = model.k_element(rng.uniform(0, 2 * math.pi, n))
    return float(np.max(np.abs(np.asarray(a(*model.group_mul(x, k))) - np.asarray(a(*x)))))


def suite_atoms(cfg: RunConfig) -> Report:
    models = _models(cfg)
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-6)
    for m in models:
        mid = m.model_id.value
        atoms = _atoms(cfg, m, cfg.trials or 50)
        for i, a in enumerate(atoms):
            rep.add(_atom_check(f"{mid}:atom[{i}]", verify_atom(m, a, tol, nodes=cfg.nodes), {"radius": a.ball.radius, "center": list(a.ball.center)}))
        if not m.has_trivial_k:
            for i, a in enumerate(atoms[:10]):
                b = k_average_atom(m, a)
                rep.add(_atom_check(f"{mid}:k_averaged[{i}]", verify_atom(m, b, tol), {"c": b.meta["c"], "R_K": b.meta["R_K"]}))
                res = k_invariance_residual(m, b, seed=cfg.seed)
                rep.add(Check(f"{mid}:k_invariance[{i}]", res < 1e-9, residuals={"max_abs": res}, provenance={"max_abs": "sampled"}))
        if cfg.corpus == "default":
            for i, (cand, axiom) in enumerate(constructed_violations(m, cfg.seed)):
                r = verify_atom(m, cand, tol)
                rep.add(_atom_check(f"{mid}:violation[{i}]", r, {"intended": axiom, "expect_fail": True}, passed=r.failed == [axiom]))
    return rep


def default_h1_kernel(model: SpaceModel) -> DiscreteKernel:
    if model.model_id is ModelId.REAL_LINE:
        params = [1 / 8, 1 / 4, 1 / 2, 1.0, 2.0, 4.0, 8.0]
    elif model.signed_params:
        params = [-2.0, 0.5, 2.0]
    else:
        params = [0.5, 2.0]
    return discrete_kernel([1.0 / len(params)] * len(params), params)


def decomposition_corpus(model: SpaceModel, seed: int, n: int = 2) -> list[AtomicDecomposition]:
    """A single-atom and a two-atom decomposition per round, right-K-invariant where K is nontrivial."""
    atoms = [k_average_atom(model, a) for a in atom_corpus(model, 3 * n, seed=seed)]
    out = []
    for i in range(n):
        out.append(AtomicDecomposition([(1.0, atoms[3 * i])]))
        out.append(AtomicDecomposition([(0.5, atoms[3 * i + 1]), (-0.25, atoms[3 * i + 2])]))
    return out


def _l1_quad(model: SpaceModel, decomp: AtomicDecomposition) -> QuadratureSpec:
    lo = np.full(model.quotient_dim, np.inf)
    hi = -lo
    rmin = np.inf
    for _, a in decomp.terms:
        q = np.array([float(np.ravel(c)[0]) for c in model.project(tuple(a.ball.center))])
        lo, hi = np.minimum(lo, q - a.ball.radius), np.maximum(hi, q + a.ball.radius)
        rmin = min(rmin, a.ball.radius)
    cap = 400_000 if model.quotient_dim == 1 else 384
    n = int(min(cap, max(4096 if model.quotient_dim == 1 else 128, np.max(hi - lo) / rmin * 200)))
    return QuadratureSpec(box=tuple(zip(lo.tolist(), hi.tolist())), nodes=n)


def suite_h1(cfg: RunConfig) -> Report:
    """Decomposition transport through H on a small corpus, with the H^1 bound and bracket checks."""
    models = _models(cfg)
    rep = _new_report(cfg, models)
    tol = _tol(cfg, 1e-6)
    for m in models:
        mid = m.model_id.value
        kernel = load_kernel(cfg.kernel, m) if cfg.kernel else default_h1_kernel(m)
        bound_rep = h1_bound(m, kernel, seed=cfg.seed)
        rep.constants[mid]["k_sources"] = bound_rep.extra["k_sources"]
        rep.add(Check(f"{mid}:h1_bound_finite", bound_rep.status == "ok" and math.isfinite(bound_rep.bound), bound=bound_rep.bound,
                      provenance={"bound": "analytic"}, detail={"status": bound_rep.status}))
        if bound_rep.status != "ok":
            continue
        disc = as_discrete(m, kernel)
        for di, d in enumerate(decomposition_corpus(m, cfg.seed)):
            tag = f"{mid}:decomp[{di}]"
            try:
                t = apply_to_decomposition(m, disc, d, seed=cfg.seed)
            except AtomError as exc:
                rep.add(Check(f"{tag}:pushforward", False, residuals=exc.report.to_dict(), detail={"error": str(exc)}))
                continue
            srcs = sorted({b.meta["k_source"] for _, b in t.terms})
            rep.add(Check(f"{tag}:pushforward", True, detail={"entries": len(t), "k_sources": srcs}))
            mass_in, mass_out = h1_upper(d), h1_upper(t)
            rep.add(Check(f"{tag}:mass_inequality", mass_out <= bound_rep.bound * mass_in * (1 + tol), bound=bound_rep.bound * mass_in,
                          empirical=mass_out, provenance={"bound": "analytic", "empirical": "exact-sum"}))
            err = transported_matches(m, disc, d, t, seed=cfg.seed)
            rep.add(Check(f"{tag}:re_expansion", err < tol, residuals={"max_abs": err}, provenance={"max_abs": "sampled"}))
            for label, dd in (("input", d), ("transported", t)):
                if not dd.terms:
                    continue
                l1 = l1_lower(m, quotient_view(m, dd), _l1_quad(m, dd))
                up = h1_upper(dd)
                rep.add(Check(f"{tag}:sandwich_{label}", l1 <= up * (1 + 1e-3), bound=up, empirical=l1,
                              provenance={"bound": "exact-sum", "empirical": "quadrature"}))
    return rep


# --- estimate ---------------------------------------------------------------------------------


def _default_params(model: SpaceModel) -> list[float]:
    return [0.5, 2.0, 3.0] if not model.signed_params else [-3.0, 0.5, 2.0, 4.0]


def suite_estimate(cfg: RunConfig, which: str) -> Report:
    models = _models(cfg)
    rep = _new_report(cfg, models)
    for m in models:
        mid = m.model_id.value
        params = cfg.params or _default_params(m)
        try:
            for u in params:
                m.check_param(u)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if which == "mod":
            tol = _tol(cfg, 0.01)
            for u in params:
                r = resolved_modulus(m, u, cfg.mc_samples or DEFAULT_MC_SAMPLES, cfg.seed, tol)
                err = abs(r["measured"] / r["analytic"] - 1.0)
                rep.add(Check(f"{mid}:modulus[u={u:g}]", err <= tol, bound=r["analytic"], empirical=r["measured"],
                              residuals={"rel_err": err, "stderr": r["stderr"]},
                              provenance={"bound": "analytic", "empirical": "measured"},
                              detail={k: v for k, v in r.items() if k in ("value", "source", "example_claim")}))
            x = tuple(float(c[0]) for c in m.random_points(rng_for(cfg.seed, 45), 1, scale=2.0))
            est = modular_estimate(m, x, cfg.mc_samples or DEFAULT_MC_SAMPLES, cfg.seed)
            err = abs(est.value - m.modular_value)
            rep.add(Check(f"{mid}:modular_function", err <= tol, bound=m.modular_value, empirical=est.value,
                          residuals={"abs_err": err, "stderr": est.stderr}, provenance={"bound": "analytic", "empirical": "measured"},
                          detail={"x": list(x)}))
        elif which == "lipschitz":
            tol = _tol(cfg, 0.01)
            for u in params:
                exact = float(m.auto_lipschitz(u))
                est = lipschitz_estimate(m, u, seed=cfg.seed)
                err = abs(est / exact - 1.0)
                rep.add(Check(f"{mid}:lipschitz[u={u:g}]", err <= tol, bound=exact, empirical=est, residuals={"rel_err": err},
                              provenance={"bound": "analytic", "empirical": "measured"}))
        elif which == "doubling":
            tol = _tol(cfg, 0.05)
            kwargs = {"seed": cfg.seed}
            if cfg.mc_samples:
                kwargs["samples_per_ball"] = cfg.mc_samples
            est = doubling_estimate(m, **kwargs)
            for name, exact, got in (("C_nu", m.doubling_constant, est.C), ("s", m.dimension, est.s)):
                err = abs(got / exact - 1.0)
                rep.add(Check(f"{mid}:doubling_{name}", err <= tol, bound=exact, empirical=got, residuals={"rel_err": err},
                              provenance={"bound": "analytic", "empirical": "measured"}))
        else:
            raise InputError(f"unknown estimate {which!r}")
    return rep


# --- bounds ---------------------------------------------------------------------------------


def _require_kernel(cfg: RunConfig, model: SpaceModel):
    if cfg.kernel is None:
        raise InputError(f"{cfg.command} needs --kernel")
    return load_kernel(cfg.kernel, model)


def suite_bounds_lp(cfg: RunConfig) -> Report:
    m = _require_model(cfg)
    kernel = _require_kernel(cfg, m)
    p = 1.0 if cfg.p is None else cfg.p
    if not p >= 1:
        raise InputError("--p must be >= 1 (or inf)")
    rep = _new_report(cfg, [m])
    tol = _tol(cfg, 1e-3)
    br = lp_bound(m, kernel, p, tol=tol)
    if br.status == "ok" and (cfg.trials is None or cfg.trials > 0):
        br.empirical = empirical_opnorm(m, kernel, p, default_family(m, cfg.seed, size=cfg.trials or 6))
    rep.add(Check(f"{m.model_id.value}:{br.name}", br.passed, bound=br.bound, empirical=_finite(br.empirical),
                  residuals={"ratio": br.ratio}, provenance={"bound": "analytic" if isinstance(kernel, DiscreteKernel) else "quadrature",
                                                             "empirical": "quadrature"},
                  detail={"status": br.status, "kernel": br.kernel, "p": p, "tol": tol}))
    return rep


def suite_bounds_h1(cfg: RunConfig) -> Report:
    m = _require_model(cfg)
    kernel = _require_kernel(cfg, m)
    rep = _new_report(cfg, [m])
    tol = _tol(cfg, 1e-6)
    corpus = decomposition_corpus(m, cfg.seed, 1) if isinstance(kernel, DiscreteKernel) else ()
    try:
        br = h1_bound(m, kernel, corpus, seed=cfg.seed, tol=tol)
    except AtomError as exc:
        rep.add(Check(f"{m.model_id.value}:h1_bound", False, detail={"error": str(exc)}))
        return rep
    rep.constants[m.model_id.value]["k_sources"] = br.extra["k_sources"]
    rep.add(Check(f"{m.model_id.value}:h1_bound", br.passed, bound=br.bound, empirical=_finite(br.empirical),
                  residuals={"ratio": br.ratio}, provenance={"bound": "analytic" if isinstance(kernel, DiscreteKernel) else "quadrature",
                                                             "empirical": "exact-sum"},
                  detail={"status": br.status, "kernel": br.kernel, "tol": tol,
                          "empirical_note": None if corpus else "density kernel: bound only"}))
    return rep


SUITES: dict[str, Callable[[RunConfig], Report]] = {
    "model info": suite_model_info,
    "verify weil": suite_weil,
    "verify lp": suite_lp,
    "verify regularity": suite_regularity,
    "verify atoms": suite_atoms,
    "verify h1": suite_h1,
    "estimate mod": lambda c: suite_estimate(c, "mod"),
    "estimate lipschitz": lambda c: suite_estimate(c, "lipschitz"),
    "estimate doubling": lambda c: suite_estimate(c, "doubling"),
    "bounds lp": suite_bounds_lp,
    "bounds h1": suite_bounds_h1,
}


def run_suite(cfg: RunConfig) -> Report:
    cfg.validate()
    suite = SUITES.get(cfg.command)
    if suite is None:
        raise InputError(f"unknown command {cfg.command!r}")
    return suite(cfg)
