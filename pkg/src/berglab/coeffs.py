"""Truncated orthonormal-basis representation of space elements.

Scalar basis functions are normalized monomials e_m(z) = c_m z^m (per factor;
tensor products on the bidisc), truncated to m < n_modes per complex variable.
A C^d-valued element is stored as a coefficient array of shape (n_scalar, d);
flattening is row-major, so the full index of (mode m, component k) is
m * d + k, matching the operator-matrix convention.

Truncation honesty is tracked through the closed-form kernel tail
certificates from `spaces`; kernel probe vectors are renormalized to unit
length after truncation so that sandwiching the identity operator gives the
identity exactly at any admissible probe point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import spaces
from .spaces import KIND_BIDISC, KIND_DISC, KIND_FOCK, SpaceSpec
from .quadrature import QuadratureRule


@dataclass(frozen=True)
class BasisSpec:
    space: SpaceSpec
    n_modes: int  # per complex variable

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("need at least one mode")

    @property
    def n_scalar(self) -> int:
        return self.n_modes ** self.space.nfactors

    @property
    def dim(self) -> int:
        return self.n_scalar * self.space.d


def _factor_log_normalizers(kind: str, alpha: float, n: int) -> np.ndarray:
    m = np.arange(n)
    if kind == KIND_DISC:
        return 0.5 * (gammaln(m + 2.0 + alpha) - gammaln(m + 1.0) - gammaln(2.0 + alpha))
    if kind == KIND_FOCK:
        return -0.5 * gammaln(m + 1.0)
    raise ValueError(kind)


def basis_normalizer(basis: BasisSpec) -> np.ndarray:
    """c_m for every scalar mode, ordered as the flattened mode list."""
    sp = basis.space
    if sp.kind == KIND_BIDISC:
        a1, a2 = sp.alphas
        c1 = np.exp(_factor_log_normalizers(KIND_DISC, a1, basis.n_modes))
        c2 = np.exp(_factor_log_normalizers(KIND_DISC, a2, basis.n_modes))
        return np.outer(c1, c2).ravel()
    return np.exp(_factor_log_normalizers(sp.kind, sp.alpha, basis.n_modes))


def _factor_power_matrix(pts: np.ndarray, n: int) -> np.ndarray:
    return pts[None, :] ** np.arange(n)[:, None]


def scalar_basis_matrix(basis: BasisSpec, points) -> np.ndarray:
    """Evaluations e_m(p): shape (n_scalar, n_points)."""
    sp = basis.space
    pts = spaces.as_points(sp, points)
    if sp.kind == KIND_BIDISC:
        pts = pts.reshape(-1, 2)
        a1, a2 = sp.alphas
        e1 = np.exp(_factor_log_normalizers(KIND_DISC, a1, basis.n_modes))[:, None] \
            * _factor_power_matrix(pts[:, 0], basis.n_modes)
        e2 = np.exp(_factor_log_normalizers(KIND_DISC, a2, basis.n_modes))[:, None] \
            * _factor_power_matrix(pts[:, 1], basis.n_modes)
        return (e1[:, None, :] * e2[None, :, :]).reshape(basis.n_scalar, pts.shape[0])
    pts = pts.reshape(-1)
    return basis_normalizer(basis)[:, None] * _factor_power_matrix(pts, basis.n_modes)


@dataclass
class CoeffFunction:
    """Element of the truncated space: coefficients against the e_m x e_k basis."""

    basis: BasisSpec
    coeffs: np.ndarray  # (n_scalar, d) complex

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.basis.n_scalar, self.basis.space.d):
            raise ValueError(
                f"coefficient shape {c.shape} does not match basis "
                f"({self.basis.n_scalar}, {self.basis.space.d})"
            )
        self.coeffs = c

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def from_flat(basis: BasisSpec, flat: np.ndarray) -> CoeffFunction:
    return CoeffFunction(basis, np.asarray(flat, dtype=complex).reshape(basis.n_scalar, basis.space.d))


def inner(f: CoeffFunction, g: CoeffFunction) -> complex:
    return complex(np.sum(f.coeffs * np.conj(g.coeffs)))


def eval_coeffs(f: CoeffFunction, points) -> np.ndarray:
    """Pointwise values, shape (n_points, d)."""
    E = scalar_basis_matrix(f.basis, points)
    return E.T @ f.coeffs


def project_grid_function(basis: BasisSpec, rule: QuadratureRule, samples) -> CoeffFunction:
    """Orthogonal projection of grid samples onto the truncated analytic space.

    samples: (n_nodes,) scalar or (n_nodes, d).
    """
    s = np.asarray(samples, dtype=complex)
    if s.ndim == 1:
        # scalar samples land in component 0
        coeffs = np.zeros((basis.n_scalar, basis.space.d), dtype=complex)
        coeffs[:, 0] = project_scalar_samples(basis, rule, s)
        return CoeffFunction(basis, coeffs)
    if s.shape != (rule.n_nodes, basis.space.d):
        raise ValueError("samples must be (n_nodes,) or (n_nodes, d)")
    E = scalar_basis_matrix(basis, rule.nodes)
    coeffs = (E.conj() * rule.sigma_weights[None, :]) @ s
    return CoeffFunction(basis, coeffs)


def project_scalar_samples(basis: BasisSpec, rule: QuadratureRule, samples) -> np.ndarray:
    """Scalar-mode projection coefficients <f, e_m> for scalar grid samples."""
    s = np.asarray(samples, dtype=complex).reshape(-1)
    E = scalar_basis_matrix(basis, rule.nodes)
    return (E.conj() * rule.sigma_weights[None, :]) @ s


def kernel_coeff_vector(basis: BasisSpec, z, normalized: bool = True, renormalize: bool = True) -> np.ndarray:
    """Scalar coefficients of the (normalized) kernel direction at z.

    <K_z, e_m> = conj(e_m(z)).  With renormalize=True the truncated vector is
    scaled to unit length, so identity sandwiches stay exact regardless of the
    truncation slack at z; the slack itself is available from
    spaces.relative_kernel_tail.
    """
    spaces.check_probe_point(basis.space, z)
    v = np.conj(scalar_basis_matrix(basis, z)[:, 0])
    if not normalized:
        return v
    if renormalize:
        n = np.linalg.norm(v)
    else:
        n = spaces.kernel_norm(basis.space, z)
    return v / n


def kernel_as_coeffs(basis: BasisSpec, z, component: int = 0, normalized: bool = True,
                     renormalize: bool = True) -> CoeffFunction:
    """k_z e_component as a coefficient function."""
    d = basis.space.d
    if not 0 <= component < d:
        raise ValueError("component out of range")
    v = kernel_coeff_vector(basis, z, normalized=normalized, renormalize=renormalize)
    coeffs = np.zeros((basis.n_scalar, d), dtype=complex)
    coeffs[:, component] = v
    return CoeffFunction(basis, coeffs)


def kernel_tail_certificate(basis: BasisSpec, z) -> float:
    """Relative truncation residual of K_z against this basis."""
    return float(spaces.relative_kernel_tail(basis.space, z, basis.n_modes))


def random_coeff_function(basis: BasisSpec, rng: np.random.Generator, unit: bool = True) -> CoeffFunction:
    c = rng.standard_normal((basis.n_scalar, basis.space.d)) \
        + 1j * rng.standard_normal((basis.n_scalar, basis.space.d))
    if unit:
        c = c / np.linalg.norm(c)
    return CoeffFunction(basis, c)


def random_polynomial(basis: BasisSpec, rng: np.random.Generator, degree: int,
                      unit: bool = True) -> CoeffFunction:
    """Random analytic polynomial with per-factor degree at most `degree`."""
    deg = min(degree, basis.n_modes - 1)
    c = np.zeros((basis.n_scalar, basis.space.d), dtype=complex)
    if basis.space.nfactors == 2:
        n = basis.n_modes
        rows = [m1 * n + m2 for m1 in range(deg + 1) for m2 in range(deg + 1)]
    else:
        rows = list(range(deg + 1))
    block = rng.standard_normal((len(rows), basis.space.d)) \
        + 1j * rng.standard_normal((len(rows), basis.space.d))
    c[rows, :] = block
    if unit:
        c /= np.linalg.norm(c)
    return CoeffFunction(basis, c)


# ---------------------------------------------------------------------------
# serialization (schema: space, shape, re, im)

def coeff_function_to_dict(f: CoeffFunction) -> dict:
    return {
        "space": spaces.space_to_dict(f.basis.space),
        "n_modes": f.basis.n_modes,
        "shape": list(f.coeffs.shape),
        "re": f.coeffs.real.tolist(),
        "im": f.coeffs.imag.tolist(),
    }


def coeff_function_from_dict(data: dict) -> CoeffFunction:
    sp = spaces.space_from_dict(data["space"])
    basis = BasisSpec(sp, int(data["n_modes"]))
    coeffs = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return CoeffFunction(basis, coeffs)
