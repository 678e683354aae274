"""Concrete homogeneous spaces G/K with their Haar data and automorphisms.

Three models are provided, all unimodular and all with dilation-type
automorphism families that preserve the compact subgroup K:

``real-line``
    G = (R, +), K = {0}, G/K = R.  A_c(x) = c x.
``complex-mod-circle``
    G = C^x in the cylinder chart (t, theta) with z = e^t e^{i theta},
    K = unit circle, G/K = (0, inf) charted by t = log r.  A_u(t, theta) =
    (u t, theta), i.e. r e^{i a} -> r^u e^{i a}.
``motion-group-plane``
    G = M(2)+ = R^2 x| SO(2) with (v, phi)(w, psi) = (v + R_phi w, phi + psi),
    K = SO(2), G/K = R^2.  A_c(v, phi) = (c v, phi).

Points are tuples of floats or numpy arrays (one entry per chart
coordinate); every method broadcasts over array coordinates.  Haar
measures are normalized so that K has mass one and the quotient measure is
Lebesgue measure in the quotient chart.
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class ModelId(str, enum.Enum):
    REAL_LINE = "real-line"
    COMPLEX_MOD_CIRCLE = "complex-mod-circle"
    MOTION_GROUP_PLANE = "motion-group-plane"


class QuadratureError(RuntimeError):
    """A quadrature rule failed to produce a trustworthy value."""


def wrap_angle(theta):
    """Reduce angles to [0, 2 pi)."""
    r = np.mod(theta, TWO_PI)
    return np.where(r >= TWO_PI, 0.0, r)


def centered_angle(theta):
    """Reduce angles to [-pi, pi)."""
    return wrap_angle(np.asarray(theta) + math.pi) - math.pi


def circle_distance(a, b):
    d = np.mod(np.abs(np.asarray(a) - np.asarray(b)), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def k_nodes(n: int) -> np.ndarray:
    """Midpoint nodes on the circle; symmetric under theta -> -theta, never hit pi."""
    return (np.arange(n) + 0.5) * (TWO_PI / n)


def _point(x) -> tuple:
    if np.ndim(x) == 0 and not isinstance(x, (tuple, list)):
        return (x,)
    return tuple(x)


class SpaceModel:
    """Uniform interface over the three (G, K, G/K) models.

    Subclasses fill in the chart-level formulas.  Instances carry no mutable
    state, so they can be shared freely.
    """

    model_id: ModelId
    group_vars: tuple[str, ...]
    quotient_vars: tuple[str, ...]
    angular: tuple[bool, ...]
    haar_density: float
    identity_param: float = 1.0
    # Lipschitz-to-modulus constant kappa_rho for the chosen metric (configured, see hardy_atomic)
    kappa: float = 1.0
    # sup_{r>0} nu(B(e,2r)) / nu(B(e,r)), derived from the closed-form ball volumes
    doubling_constant: float
    # sup_{k in K} rho(e, k)
    k_radius: float = 0.0
    modular_value: float = 1.0
    # False when only positive dilations are automorphisms in the family
    signed_params: bool = True

    @property
    def group_dim(self) -> int:
        return len(self.group_vars)

    @property
    def quotient_dim(self) -> int:
        return len(self.quotient_vars)

    @property
    def dimension(self) -> float:
        """The doubling dimension s = log2 C_nu."""
        return math.log2(self.doubling_constant)

    @property
    def has_trivial_k(self) -> bool:
        return not any(self.angular)

    def __repr__(self):
        return f"{type(self).__name__}()"

    # --- group structure -------------------------------------------------
    def identity(self) -> tuple:
        return (0.0,) * self.group_dim

    def group_mul(self, x, y) -> tuple:
        raise NotImplementedError

    def group_inv(self, x) -> tuple:
        raise NotImplementedError

    def dist(self, x, y):
        """Left-invariant metric rho."""
        raise NotImplementedError

    def norm(self, x):
        return self.dist(self.identity(), x)

    def k_element(self, theta) -> tuple:
        raise NotImplementedError

    def k_part(self, x) -> tuple:
        """The element k with x = section(project(x)) k."""
        return self.k_element(x[-1]) if not self.has_trivial_k else self.identity()

    def project(self, x) -> tuple:
        raise NotImplementedError

    def section(self, q) -> tuple:
        raise NotImplementedError

    def modular_function(self, x):
        x = _point(x)
        return np.full(np.broadcast(*x).shape, self.modular_value)[()]

    # --- automorphisms ---------------------------------------------------
    def check_param(self, a) -> None:
        a = np.asarray(a, dtype=float)
        if not np.all(np.isfinite(a)) or np.any(a == 0):
            raise ValueError(f"{self.model_id.value}: automorphism parameter must be finite and nonzero, got {a}")

    def auto_apply(self, a, x) -> tuple:
        raise NotImplementedError

    def induced_apply(self, a, q) -> tuple:
        """The induced homeomorphism of G/K, q -> pi_K(A(section(q)))."""
        return self.project(self.auto_apply(a, self.section(q)))

    def inverse_param(self, a):
        return 1.0 / np.asarray(a, dtype=float)

    def compose_params(self, a, b):
        """Parameter of A_a o A_b."""
        return np.asarray(a, dtype=float) * np.asarray(b, dtype=float)

    def modulus(self, a):
        """Haar scaling factor nu(A(E)) / nu(E) by change of variables in the chart."""
        raise NotImplementedError

    def auto_lipschitz(self, a):
        """Exact Lipschitz constant of A(a) for rho; linear chart axes scale by |a|, angles are fixed."""
        scale = np.abs(np.asarray(a, dtype=float))
        return np.maximum(scale, 1.0) if any(self.angular) else scale

    def example_modulus(self, a):
        """The value asserted for this family in the source worked example, if any."""
        return None

    def unit_modulus_params(self) -> tuple[float, ...]:
        """Parameters where the modulus crosses 1 (Cesaro region boundary)."""
        return (-1.0, 1.0)

    def quotient_scale(self, a):
        """Factor by which the induced map dilates the quotient chart (all models are linear there)."""
        return np.asarray(a, dtype=float)

    def preimage_box(self, a, box):
        """Chart box containing the preimage of ``box`` under the induced map."""
        s = float(self.quotient_scale(a))
        out = []
        for lo, hi in box:
            ends = sorted((lo / s, hi / s))
            out.append((ends[0], ends[1]))
        return tuple(out)

    # --- measures --------------------------------------------------------
    def ball_volume(self, r):
        """Closed-form Haar volume of B(x, r) (independent of x by left invariance)."""
        raise NotImplementedError

    def ball_box(self, center, r) -> tuple:
        """Chart box (per-coordinate (lo, hi)) containing B(center, r)."""
        center = _point(center)
        box = []
        for c, ang in zip(center, self.angular):
            h = min(r, math.pi) if ang else r
            box.append((float(c) - h, float(c) + h))
        return tuple(box)

    def k_average(self, g: Callable, x, nodes: int = 64, tol: float | None = None):
        """Average of g over the coset xK with normalized Haar measure on K.

        Uses the periodic midpoint rule with ``nodes`` points.  When ``tol``
        is given, the value is compared against the rule with half as many
        nodes and a :class:`QuadratureError` is raised on disagreement.
        """
        x = _point(x)
        if self.has_trivial_k:
            return g(*x)
        val = self._k_mean(g, x, nodes)
        if tol is not None and nodes >= 4:
            coarse = self._k_mean(g, x, nodes // 2)
            resid = np.max(np.abs(val - coarse))
            if resid > tol * max(1.0, float(np.max(np.abs(val)))):
                raise QuadratureError(
                    f"K-average not converged with {nodes} nodes: residual {resid:.3e}"
                )
        return val

    def _k_mean(self, g, x, nodes):
        ks = self.k_element(k_nodes(nodes))
        xs = tuple(np.asarray(c, dtype=float)[..., None] for c in x)
        pts = self.group_mul(xs, ks)
        return np.mean(np.broadcast_to(g(*pts), np.broadcast(*pts).shape), axis=-1)

    # --- sampling helpers ------------------------------------------------
    def random_points(self, rng: np.random.Generator, n: int, scale: float = 5.0) -> tuple:
        cols = []
        for ang in self.angular:
            cols.append(rng.uniform(0.0, TWO_PI, n) if ang else rng.uniform(-scale, scale, n))
        return tuple(cols)

    def random_params(self, rng: np.random.Generator, n: int, lo: float = 0.125, hi: float = 8.0):
        mags = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
        return mags * rng.choice([-1.0, 1.0], n)

    def info(self) -> dict:
        return {
            "model": self.model_id.value,
            "group_chart": list(self.group_vars),
            "quotient_chart": list(self.quotient_vars),
            "haar_density": self.haar_density,
            "k_radius": self.k_radius,
            "C_nu": self.doubling_constant,
            "s": self.dimension,
            "kappa_rho": self.kappa,
            "modular_function": self.modular_value,
        }


class RealLine(SpaceModel):
    model_id = ModelId.REAL_LINE
    group_vars = ("x",)
    quotient_vars = ("x",)
    angular = (False,)
    haar_density = 1.0
    doubling_constant = 2.0

    def group_mul(self, x, y):
        return (np.add(x[0], y[0]),)

    def group_inv(self, x):
        return (np.negative(x[0]),)

    def dist(self, x, y):
        return np.abs(np.subtract(x[0], y[0]))

    def k_element(self, theta):
        return (np.zeros_like(np.asarray(theta, dtype=float)),)

    def project(self, x):
        return (x[0],)

    def section(self, q):
        return (q[0],)

    def auto_apply(self, a, x):
        return (np.multiply(a, x[0]),)

    def modulus(self, a):
        return np.abs(a)

    def ball_volume(self, r):
        return 2.0 * np.asarray(r, dtype=float)


class ComplexModCircle(SpaceModel):
    model_id = ModelId.COMPLEX_MOD_CIRCLE
    group_vars = ("t", "theta")
    quotient_vars = ("t",)
    angular = (False, True)
    haar_density = 1.0 / TWO_PI
    doubling_constant = 4.0
    k_radius = math.pi

    def group_mul(self, x, y):
        return (np.add(x[0], y[0]), wrap_angle(np.add(x[1], y[1])))

    def group_inv(self, x):
        return (np.negative(x[0]), wrap_angle(np.negative(x[1])))

    def dist(self, x, y):
        return np.abs(np.subtract(x[0], y[0])) + circle_distance(x[1], y[1])

    def k_element(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (np.zeros_like(theta), wrap_angle(theta))

    def project(self, x):
        return (np.asarray(x[0], dtype=float) + 0.0 * np.asarray(x[1]),)

    def section(self, q):
        t = np.asarray(q[0], dtype=float)
        return (t, np.zeros_like(t))

    def auto_apply(self, a, x):
        return (np.multiply(a, x[0]), wrap_angle(x[1]))

    def modulus(self, a):
        # Haar measure is dt dtheta / 2pi and the map only rescales t
        return np.abs(a)

    def example_modulus(self, a):
        return np.ones_like(np.asarray(a, dtype=float))

    def ball_volume(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= math.pi, r * r / math.pi, 2.0 * r - math.pi)

    @staticmethod
    def to_radius(t):
        return np.exp(t)

    @staticmethod
    def from_radius(r):
        return np.log(r)


class MotionGroupPlane(SpaceModel):
    model_id = ModelId.MOTION_GROUP_PLANE
    group_vars = ("v1", "v2", "phi")
    quotient_vars = ("x1", "x2")
    angular = (False, False, True)
    haar_density = 1.0 / TWO_PI
    doubling_constant = 8.0
    k_radius = math.pi
    signed_params = False

    def group_mul(self, x, y):
        c, s = np.cos(x[2]), np.sin(x[2])
        return (
            x[0] + c * y[0] - s * y[1],
            x[1] + s * y[0] + c * y[1],
            wrap_angle(np.add(x[2], y[2])),
        )

    def group_inv(self, x):
        c, s = np.cos(x[2]), np.sin(x[2])
        # -R_{-phi} v
        return (-(c * x[0] + s * x[1]), -(-s * x[0] + c * x[1]), wrap_angle(np.negative(x[2])))

    def dist(self, x, y):
        return np.hypot(np.subtract(x[0], y[0]), np.subtract(x[1], y[1])) + circle_distance(x[2], y[2])

    def k_element(self, theta):
        theta = np.asarray(theta, dtype=float)
        z = np.zeros_like(theta)
        return (z, z, wrap_angle(theta))

    def project(self, x):
        pad = 0.0 * np.asarray(x[2])
        return (np.asarray(x[0], dtype=float) + pad, np.asarray(x[1], dtype=float) + pad)

    def section(self, q):
        v1 = np.asarray(q[0], dtype=float)
        v2 = np.asarray(q[1], dtype=float)
        v1, v2 = np.broadcast_arrays(v1, v2)
        return (v1, v2, np.zeros_like(v1))

    def check_param(self, a) -> None:
        a = np.asarray(a, dtype=float)
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError(f"{self.model_id.value}: dilation parameter must be positive, got {a}")

    def auto_apply(self, a, x):
        return (np.multiply(a, x[0]), np.multiply(a, x[1]), wrap_angle(x[2]))

    def modulus(self, a):
        return np.square(a)

    def unit_modulus_params(self):
        return (1.0,)

    def ball_volume(self, r):
        r = np.asarray(r, dtype=float)
        m = np.minimum(r, math.pi)
        return (r**3 - (r - m) ** 3) / 3.0

    def random_params(self, rng, n, lo=0.125, hi=8.0):
        return np.exp(rng.uniform(math.log(lo), math.log(hi), n))


_MODELS = {
    ModelId.REAL_LINE: RealLine,
    ModelId.COMPLEX_MOD_CIRCLE: ComplexModCircle,
    ModelId.MOTION_GROUP_PLANE: MotionGroupPlane,
}

_ALIASES = {
    "realline": ModelId.REAL_LINE,
    "complexmodcircle": ModelId.COMPLEX_MOD_CIRCLE,
    "motiongroupplane": ModelId.MOTION_GROUP_PLANE,
}


def make_model(model_id) -> SpaceModel:
    """Instantiate a model from a :class:`ModelId`, CLI string or class-style name."""
    if isinstance(model_id, SpaceModel):
        return model_id
    if not isinstance(model_id, ModelId):
        key = str(model_id)
        try:
            model_id = ModelId(key)
        except ValueError:
            alias = key.replace("-", "").replace("_", "").lower()
            if alias not in _ALIASES:
                choices = ", ".join(m.value for m in ModelId)
                raise ValueError(f"unknown model {key!r}; choose one of {choices}") from None
            model_id = _ALIASES[alias]
    return _MODELS[model_id]()


def as_point(model: SpaceModel, x: float | Sequence[float]) -> tuple:
    """Accept a bare float for one-dimensional charts; check the coordinate count."""
    p = _point(x)
    if len(p) != model.group_dim:
        raise ValueError(f"{model.model_id.value} points have {model.group_dim} coordinate(s), got {len(p)}")
    return p
