"""Quadrature rules on the model domains and the integral tests built on them.

Rules are tensor products of a radial Gauss rule in t = |z|^2 and a uniform
angular grid.  The radial family is matched to the sigma-density so that
monomial moments are integrated exactly up to degree 2*radial_order - 1 in t:

* disc factors: Gauss-Jacobi with weight (1-t)^alpha on [0, 1]
  (alpha = 0 reduces to Gauss-Legendre on [0, 1]);
* fock: Gauss-Laguerre with weight e^(-t) on [0, inf), so no radial cutoff
  is imposed and sum(weights) = sigma(domain) = 1 holds exactly.

Indicator symbols and small-ball masses are integrated with dedicated
region-aligned rules (a Gauss grid mapped onto the ball); sampling an
indicator on the global grid would cost ~1e-2 accuracy, the aligned rule is
spectrally accurate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import roots_jacobi, roots_laguerre, roots_legendre

from .spaces import (
    KIND_BIDISC,
    KIND_DISC,
    KIND_FOCK,
    SpaceSpec,
    kernel_eval,
    kernel_norm,
    rf_exponent_ok,
    sigma_density,
)

DEFAULT_RADIAL_ORDER = 40
DEFAULT_ANGULAR_ORDER = 64
BIDISC_RADIAL_ORDER = 12
BIDISC_ANGULAR_ORDER = 16


@dataclass(frozen=True)
class QuadratureRule:
    space: SpaceSpec
    nodes: np.ndarray          # (n,) complex, or (n, 2) for the bidisc
    sigma_weights: np.ndarray  # (n,) real, sums to sigma of the covered region
    radial_order: int
    angular_order: int
    label: str = "sigma"

    @property
    def n_nodes(self) -> int:
        return self.sigma_weights.shape[0]

    @property
    def lambda_weights(self) -> np.ndarray:
        return self.sigma_weights * kernel_norm(self.space, self.nodes) ** 2


def _radial_rule(kind: str, alpha: float, order: int, t_interval=None):
    """Nodes/weights in t for the factor's radial sigma-density."""
    if kind == KIND_DISC:
        t0, t1 = (0.0, 1.0) if t_interval is None else t_interval
        if t1 >= 1.0 - 1e-14:
            x, w = roots_jacobi(order, alpha, 0.0)
            t = t0 + (1.0 - t0) * (x + 1.0) / 2.0
            w = w * (alpha + 1.0) * ((1.0 - t0) / 2.0) ** (alpha + 1.0)
        else:
            x, w = roots_legendre(order)
            t = t0 + (t1 - t0) * (x + 1.0) / 2.0
            w = w * (t1 - t0) / 2.0 * (alpha + 1.0) * (1.0 - t) ** alpha
        return t, w
    if kind == KIND_FOCK:
        if t_interval is None:
            t, w = roots_laguerre(order)
        else:
            t0, t1 = t_interval
            x, w = roots_legendre(order)
            t = t0 + (t1 - t0) * (x + 1.0) / 2.0
            w = w * (t1 - t0) / 2.0 * np.exp(-t)
        return t, w
    raise ValueError(kind)


def _polar_grid(t, wt, angular_order: int):
    th = 2.0 * np.pi * np.arange(angular_order) / angular_order
    T, TH = np.meshgrid(t, th, indexing="ij")
    nodes = np.sqrt(T) * np.exp(1j * TH)
    W = np.repeat((wt / angular_order)[:, None], angular_order, axis=1)
    return nodes.ravel(), W.ravel()


def build_rule(
    space: SpaceSpec,
    radial_order: Optional[int] = None,
    angular_order: Optional[int] = None,
    t_interval=None,
) -> QuadratureRule:
    """Tensor sigma-rule on the full domain (or a radial sub-annulus)."""
    if space.kind == KIND_BIDISC:
        nr = radial_order or BIDISC_RADIAL_ORDER
        na = angular_order or BIDISC_ANGULAR_ORDER
        a1, a2 = space.alphas
        n1, w1 = _polar_grid(*_radial_rule(KIND_DISC, a1, nr, t_interval), na)
        n2, w2 = _polar_grid(*_radial_rule(KIND_DISC, a2, nr, t_interval), na)
        nodes = np.stack(
            [np.repeat(n1, n2.size), np.tile(n2, n1.size)], axis=-1
        )
        weights = np.repeat(w1, w2.size) * np.tile(w2, w1.size)
        return QuadratureRule(space, nodes, weights, nr, na)
    nr = radial_order or DEFAULT_RADIAL_ORDER
    na = angular_order or DEFAULT_ANGULAR_ORDER
    t, wt = _radial_rule(space.kind, space.alpha, nr, t_interval)
    nodes, weights = _polar_grid(t, wt, na)
    return QuadratureRule(space, nodes, weights, nr, na)


def integrate_sigma(rule: QuadratureRule, values) -> complex:
    return np.sum(rule.sigma_weights * np.asarray(values))


def integrate_lambda(rule: QuadratureRule, values) -> complex:
    return np.sum(rule.lambda_weights * np.asarray(values))


# ---------------------------------------------------------------------------
# region-aligned rules for balls (indicator integration)

def metric_ball_euclidean(space: SpaceSpec, center: complex, rho: float):
    """Euclidean center/radius of the invariant-metric ball (single factor)."""
    if space.kind == KIND_FOCK:
        return complex(center), float(rho)
    if space.kind == KIND_DISC:
        s = np.tanh(rho)
        a = complex(center)
        denom = 1.0 - s**2 * abs(a) ** 2
        return a * (1.0 - s**2) / denom, s * (1.0 - abs(a) ** 2) / denom
    raise ValueError("per-factor geometry only")


def ball_rule(
    space: SpaceSpec,
    center: complex,
    radius: float,
    radial_order: int = 40,
    angular_order: int = 64,
) -> QuadratureRule:
    """Sigma-rule supported on the Euclidean disc D(center, radius).

    The integrand picks up the smooth sigma-density explicitly, so the rule is
    spectrally accurate for smooth functions and exact for polynomials when
    alpha = 0 or on the fock space a Gaussian factor remains (still smooth).
    """
    if space.nfactors != 1:
        raise ValueError("ball rules are per-factor")
    if space.kind == KIND_DISC and abs(center) + radius >= 1.0:
        raise ValueError("ball sticks out of the disc")
    x, gw = roots_legendre(radial_order)
    s = (x + 1.0) / 2.0          # s in [0, 1], |w - c| = radius * sqrt(s)
    th = 2.0 * np.pi * np.arange(angular_order) / angular_order
    S, TH = np.meshgrid(s, th, indexing="ij")
    nodes = (center + radius * np.sqrt(S) * np.exp(1j * TH)).ravel()
    # dA = (radius^2/2) ds dtheta in these coordinates
    area_w = np.repeat((gw * np.pi * radius**2 / (2.0 * angular_order))[:, None], angular_order, axis=1).ravel()
    weights = area_w * sigma_density(space, nodes)
    return QuadratureRule(space, nodes, weights, radial_order, angular_order, label="ball")


def sigma_ball_mass(space, center, radius, ball_metric="euclidean", radial_order=40, angular_order=64):
    if ball_metric == "invariant":
        center, radius = metric_ball_euclidean(space, center, radius)
    rule = ball_rule(space, center, radius, radial_order, angular_order)
    return float(np.real(integrate_sigma(rule, np.ones(rule.n_nodes))))


def lambda_ball_mass(space, center, radius, ball_metric="euclidean", radial_order=40, angular_order=64):
    if ball_metric == "invariant":
        center, radius = metric_ball_euclidean(space, center, radius)
    rule = ball_rule(space, center, radius, radial_order, angular_order)
    return float(np.real(integrate_lambda(rule, np.ones(rule.n_nodes))))


# ---------------------------------------------------------------------------
# matrix-valued Schur test

@dataclass
class MatrixKernelSample:
    """Nonnegative matrix kernel sampled on node pairs with measure weights.

    values[x, y, i, k] >= 0; mu_weights weight the x-nodes, nu_weights the
    y-nodes.  The associated discrete operator maps L^2(nu) x C^d to
    L^2(mu) x C^d via (Tf)(x, i) = sum_{y,k} nu_y values[x,y,i,k] f(y,k).
    """

    values: np.ndarray
    mu_weights: np.ndarray
    nu_weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 4 or v.shape[2] != v.shape[3]:
            raise ValueError("values must have shape (nx, ny, d, d)")
        if np.any(v < -1e-15):
            raise ValueError("Schur test requires a nonnegative kernel")
        self.values = np.maximum(v, 0.0)
        self.mu_weights = np.asarray(self.mu_weights, dtype=float)
        self.nu_weights = np.asarray(self.nu_weights, dtype=float)

    @property
    def d(self) -> int:
        return self.values.shape[2]


def schur_test(sample: MatrixKernelSample, p: float = 2.0, h_x=None, h_y=None) -> dict:
    """Two-sided Schur bound for the discrete operator of `sample`.

    With q the conjugate exponent, a positive test weight h and

        C1 = max_{x,i} h(x)^-q sum_y nu_y h(y)^q sum_k M[x,y,i,k]
        C2 = max_{y,k} h(y)^-p sum_x mu_x h(x)^p sum_i M[x,y,i,k]

    the operator norm is at most C1^(1/q) * C2^(1/p).
    """
    if p <= 1:
        raise ValueError("Schur test needs p > 1")
    q = p / (p - 1.0)
    nx, ny, d, _ = sample.values.shape
    hx = np.ones(nx) if h_x is None else np.asarray(h_x, dtype=float)
    hy = np.ones(ny) if h_y is None else np.asarray(h_y, dtype=float)
    if np.any(hx <= 0) or np.any(hy <= 0):
        raise ValueError("test weight must be positive")
    row = np.einsum("y,xyik->xi", sample.nu_weights * hy**q, sample.values)
    c1 = float(np.max(row / hx[:, None] ** q))
    col = np.einsum("x,xyik->yk", sample.mu_weights * hx**p, sample.values)
    c2 = float(np.max(col / hy[:, None] ** p))
    return {"C1": c1, "C2": c2, "bound": c1 ** (1.0 / q) * c2 ** (1.0 / p), "p": p, "q": q}


def discretized_norm(sample: MatrixKernelSample) -> float:
    """Largest singular value of the weighted flattening of the sample."""
    nx, ny, d, _ = sample.values.shape
    a = sample.values * np.sqrt(sample.mu_weights)[:, None, None, None]
    a = a * sample.nu_weights[None, :, None, None] / np.sqrt(sample.nu_weights)[None, :, None, None]
    flat = a.transpose(0, 2, 1, 3).reshape(nx * d, ny * d)
    return float(np.linalg.norm(flat, 2))


# ---------------------------------------------------------------------------
# normalized kernel-power integrals

@dataclass
class RudinForelliReport:
    r: float
    s: float
    z_grid: np.ndarray
    I: np.ndarray
    J: np.ndarray
    ratio: np.ndarray
    sup_I: float

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "I": [float(v) for v in self.I],
            "J": [float(v) for v in self.J],
            "ratio": [float(v) for v in self.ratio],
            "sup_I": float(self.sup_I),
        }


def rudin_forelli(space: SpaceSpec, rule: QuadratureRule, z_grid, r: float, s: float) -> RudinForelliReport:
    """Evaluate I(z) and its companion J(z) over a z-grid.

        I(z) = int |<K_z, K_w>|^((r+s)/2) / (||K_z||^s ||K_w||^r) d lambda(w)
        J(z) = int |<K_z, K_w>|^((r-s)/2) / ||K_w||^r d lambda(w)

    Both share the boundary radial exponent governed by r; pairs with a
    non-integrable exponent are rejected up front.
    """
    if s <= 0 or r <= 0:
        raise ValueError("exponents must be positive")
    if not rf_exponent_ok(space, r):
        raise ValueError(
            f"non-integrable kernel-power integrand for r={r} on {space.kind}: "
            "radial boundary exponent <= -1"
        )
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=complex)) if space.nfactors == 1 else np.atleast_2d(np.asarray(z_grid, dtype=complex))
    lam = rule.lambda_weights
    nw_log = np.log(kernel_norm(space, rule.nodes))
    I = np.empty(len(z_grid))
    J = np.empty(len(z_grid))
    with np.errstate(under="ignore"):
        for idx, z in enumerate(z_grid):
            pair_log = np.log(np.abs(kernel_eval(space, z, rule.nodes)))
            nz_log = np.log(kernel_norm(space, z))
            I[idx] = np.sum(lam * np.exp((r + s) / 2.0 * pair_log - s * nz_log - r * nw_log))
            J[idx] = np.sum(lam * np.exp((r - s) / 2.0 * pair_log - r * nw_log))
    return RudinForelliReport(r, s, z_grid, I, J, J / I, float(np.max(I)))
