"""Diagnostic functionals on assembled operators.

Boundedness integrals probe sup_z of kernel-displaced L^p(sigma) quantities;
the Berezin transform and conjugated-operator shells diagnose compactness at
truncation.  All z probes are gated by the space's admissible region, and all
randomness is seeded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import spaces
from .coeffs import BasisSpec, CoeffFunction, from_flat, kernel_coeff_vector, scalar_basis_matrix
from .operators import OperatorMatrix, conjugate_operator, translation_matrix
from .quadrature import QuadratureRule
from .spaces import KIND_BIDISC, KIND_DISC, KIND_FOCK, SpaceSpec


# ---------------------------------------------------------------------------
# probe grids

def default_probe_grid(space: SpaceSpec) -> List:
    """Small z grid inside the admissible region, origin plus two rings."""
    if space.kind == KIND_DISC:
        radii = [0.35, 0.6]
    elif space.kind == KIND_FOCK:
        radii = [0.8, min(1.8, space.fock_probe_radius)]
    else:
        grid1 = default_probe_grid(space.factor(0))
        return [np.array([z, z]) for z in grid1]
    ang = [1.0, np.exp(2j * np.pi / 3)]
    grid: List = [0.0 + 0.0j]
    for r in radii:
        grid.extend(r * a for a in ang)
    return grid


def boundary_shells(space: SpaceSpec, radii: Optional[Sequence[float]] = None,
                    n_angles: int = 3) -> List[List]:
    """Shells of z values of increasing invariant distance from the origin."""
    if radii is None:
        if space.kind == KIND_DISC:
            radii = [0.5, 0.65, 0.8, min(0.9, space.r_max)]
        elif space.kind == KIND_FOCK:
            top = space.fock_probe_radius
            radii = [0.4 * top, 0.6 * top, 0.8 * top, top]
        else:
            top = min(0.8, space.r_max)
            radii = [0.5 * top, 0.7 * top, 0.85 * top, top]
    angles = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    shells = []
    for r in radii:
        if space.kind == KIND_BIDISC:
            shells.append([np.array([r * a, r * a]) for a in angles])
        else:
            shells.append([r * a for a in angles])
    return shells


# ---------------------------------------------------------------------------
# RKT reports

@dataclass
class RktReport:
    """Per-(z, unit-index) values of one boundedness integral, with its sup."""

    label: str
    p: float
    z_grid: list
    values: np.ndarray  # (n_z, d)
    kappa: float
    sup: float = field(init=False)
    p_threshold: float = field(init=False)
    admissible: bool = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("integral values must be nonnegative")
        self.sup = float(self.values.max()) if self.values.size else 0.0
        self.p_threshold = (4.0 - self.kappa) / (2.0 - self.kappa)
        self.admissible = self.p > self.p_threshold

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "kappa": self.kappa,
            "p_threshold": self.p_threshold,
            "admissible": self.admissible,
            "sup": self.sup,
            "values": self.values.tolist(),
            "z_grid": [spaces.point_to_jsonable(z) for z in self.z_grid],
        }


def _check_p(p: float) -> None:
    if not p > 1.0:
        raise ValueError("p must exceed 1")


def _lp_norm(rule: QuadratureRule, samples: np.ndarray, p: float) -> np.ndarray:
    """L^p(sigma) norms along axis 0 of samples (n_nodes, ...)."""
    w = rule.sigma_weights.reshape((-1,) + (1,) * (samples.ndim - 1))
    return np.sum(w * np.abs(samples) ** p, axis=0) ** (1.0 / p)


def rkt_boundedness_check(basis: BasisSpec, rule: QuadratureRule, T: OperatorMatrix,
                          T_adjoint: Optional[OperatorMatrix] = None, p: float = 4.0,
                          z_grid: Optional[Sequence] = None) -> Tuple[RktReport, RktReport]:
    """Kernel-displacement boundedness integrals for T* (first) and T (second).

    Per z and unit index i: apply the operator to the normalized truncated
    kernel in component i, move it back with U_z, and take the L^p(sigma) norm
    of the pointwise l1 component sum.
    """
    _check_p(p)
    space = basis.space
    if T_adjoint is None:
        T_adjoint = T.adjoint()
    if z_grid is None:
        z_grid = default_probe_grid(space)
    d = space.d
    vals = {"adjoint_side": [], "direct_side": []}
    E = scalar_basis_matrix(basis, rule.nodes)
    for z in z_grid:
        spaces.check_probe_point(space, z)
        v = kernel_coeff_vector(basis, z)
        X = np.einsum("m,ik->mik", v, np.eye(d)).reshape(basis.dim, d)  # columns k_z e_i
        U = translation_matrix(basis, z)
        for side, A in (("adjoint_side", T_adjoint), ("direct_side", T)):
            H = U.mat @ (A.mat @ X)                       # (dim, d) columns
            C = H.reshape(basis.n_scalar, d, d)           # (mode, component, probe i)
            S = np.einsum("mu,mki->uki", E, C)            # samples (node, component, i)
            integrand = np.sum(np.abs(S), axis=1) ** p    # (node, i)
            vals[side].append(
                np.sum(rule.sigma_weights[:, None] * integrand, axis=0) ** (1.0 / p))
    kap = space.kappa
    return (RktReport("adjoint_side", p, list(z_grid), np.array(vals["adjoint_side"]), kap),
            RktReport("direct_side", p, list(z_grid), np.array(vals["direct_side"]), kap))


def rkt_toeplitz_symbol_check(rule: QuadratureRule, F, p: float = 4.0,
                              z_grid: Optional[Sequence] = None) -> Tuple[RktReport, RktReport]:
    """Row/column sums of L^p(sigma) norms of phi_z-pulled-back symbol entries."""
    _check_p(p)
    space = F.space
    if z_grid is None:
        z_grid = default_probe_grid(space)
    rows, cols = [], []
    for z in z_grid:
        spaces.check_probe_point(space, z)
        moved = spaces.involution(space, z, rule.nodes)
        V = F.eval(moved)                      # (n, d, d)
        entry_norms = _lp_norm(rule, V, p)     # (d, d)
        rows.append(entry_norms.sum(axis=1))   # over k for each i
        cols.append(entry_norms.sum(axis=0))   # over i for each k
    kap = space.kappa
    return (RktReport("row_side", p, list(z_grid), np.array(rows), kap),
            RktReport("column_side", p, list(z_grid), np.array(cols), kap))


def _require_analytic(F) -> None:
    if F.poly is None or F.balls:
        raise ValueError("analytic polynomial symbol required")
    for terms in F.poly.values():
        for powers in terms:
            conj_powers = powers[1::2] if len(powers) == 4 else powers[1:]
            if any(b != 0 for b in conj_powers):
                raise ValueError("analytic polynomial symbol required")


def rkt_product_check(rule: QuadratureRule, F, G, p: float = 4.0,
                      z_grid: Optional[Sequence] = None) -> Tuple[RktReport, RktReport]:
    """Boundedness quantities for the product of an analytic Toeplitz pair.

    Per z and unit index k: sum over i of the L^p(sigma) norm of
    u -> <G(z)* e_k, (F* o phi_z)(u) e_i>; plus the mirrored quantity.
    """
    _check_p(p)
    _require_analytic(F)
    _require_analytic(G)
    space = F.space
    if z_grid is None:
        z_grid = default_probe_grid(space)
    first, second = [], []
    for z in z_grid:
        spaces.check_probe_point(space, z)
        moved = spaces.involution(space, z, rule.nodes)
        for out, A, B in ((first, F, G), (second, G, F)):
            Av = A.eval(moved)                                # (n, d, d)
            Bz = B.eval(np.atleast_1d(z) if space.nfactors == 1 else z)[0]
            S = np.einsum("uij,kj->uki", Av, np.conj(Bz))
            out.append(_lp_norm(rule, S, p).sum(axis=1))      # over i, per k
    kap = space.kappa
    return (RktReport("first_side", p, list(z_grid), np.array(first), kap),
            RktReport("second_side", p, list(z_grid), np.array(second), kap))


def hankel_rkt_check(rule: QuadratureRule, F, p: float = 4.0,
                     z_grid: Optional[Sequence] = None) -> RktReport:
    """Oscillation integrals sup_i {int (sum_k |F(z)-F(phi_z(u))|_ik)^p dsigma}^{1/p}."""
    _check_p(p)
    space = F.space
    if z_grid is None:
        z_grid = default_probe_grid(space)
    out = []
    for z in z_grid:
        spaces.check_probe_point(space, z)
        moved = spaces.involution(space, z, rule.nodes)
        Fz = F.eval(np.atleast_1d(z) if space.nfactors == 1 else z)[0]
        delta = Fz[None, :, :] - F.eval(moved)
        integrand = np.sum(np.abs(delta), axis=2) ** p      # (node, i)
        out.append(np.sum(rule.sigma_weights[:, None] * integrand, axis=0) ** (1.0 / p))
    return RktReport("oscillation", p, list(z_grid), np.array(out), space.kappa)


# ---------------------------------------------------------------------------
# Berezin transform

def berezin(T: OperatorMatrix, z) -> np.ndarray:
    """d x d matrix of kernel-state expectations of T at z.

    Uses truncated kernels renormalized to unit norm, so the identity operator
    maps to the identity matrix exactly at truncation.
    """
    basis = T.basis
    d = basis.space.d
    v = kernel_coeff_vector(basis, z)
    T4 = T.mat.reshape(basis.n_scalar, d, basis.n_scalar, d)
    return np.einsum("a,aibk,b->ik", v.conj(), T4, v)


@dataclass
class BerezinProfile:
    radii: np.ndarray
    angles: np.ndarray
    matrices: np.ndarray      # (n_radii, n_angles, d, d)
    profile: np.ndarray       # per-radius max |entry|
    threshold: float
    decaying: bool = field(init=False)

    def __post_init__(self):
        tail = self.profile[-3:]
        strictly_down = len(tail) == 3 and tail[0] > tail[1] > tail[2]
        self.decaying = bool(strictly_down and self.profile[-1] < self.threshold)

    @property
    def final_value(self) -> float:
        return float(self.profile[-1])

    def as_dict(self) -> dict:
        return {
            "radii": self.radii.tolist(),
            "angles": self.angles.tolist(),
            "profile": self.profile.tolist(),
            "threshold": self.threshold,
            "decaying": self.decaying,
            "final_value": self.final_value,
        }


def _ray_point(space: SpaceSpec, r: float, phase: complex):
    if space.kind == KIND_BIDISC:
        return np.array([r * phase, r * phase])
    return r * phase


def berezin_decay_profile(T: OperatorMatrix, radii: Optional[Sequence[float]] = None,
                          angles: Optional[Sequence[float]] = None,
                          threshold: float = 0.05) -> BerezinProfile:
    space = T.basis.space
    if radii is None:
        if space.kind == KIND_FOCK:
            top = spaces.probe_radius_max(space)
        elif space.kind == KIND_BIDISC:
            top = min(0.85, space.r_max)
        else:
            top = min(0.9, space.r_max)
        radii = np.linspace(0.15 * top, top, 6)
    if angles is None:
        angles = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    radii = np.asarray(radii, dtype=float)
    angles = np.asarray(angles, dtype=float)
    d = space.d
    mats = np.zeros((len(radii), len(angles), d, d), dtype=complex)
    for a, r in enumerate(radii):
        for b, th in enumerate(angles):
            mats[a, b] = berezin(T, _ray_point(space, r, np.exp(1j * th)))
    profile = np.max(np.abs(mats), axis=(1, 2, 3))
    return BerezinProfile(radii, angles, mats, profile, threshold)


# ---------------------------------------------------------------------------
# essential norm estimate

@dataclass
class EssentialNormReport:
    shell_metric: np.ndarray        # invariant distance of each shell from 0
    lower_profile: np.ndarray       # per-shell max_f ||T^z f||
    estimate: float                 # value at the outermost shell
    sv_proxy_index: int
    sv_proxy_value: float
    top_singular_value: float
    last_two_decreasing: bool

    def as_dict(self) -> dict:
        return {
            "shell_metric": self.shell_metric.tolist(),
            "lower_profile": self.lower_profile.tolist(),
            "estimate": self.estimate,
            "sv_proxy_index": self.sv_proxy_index,
            "sv_proxy_value": self.sv_proxy_value,
            "top_singular_value": self.top_singular_value,
            "last_two_decreasing": self.last_two_decreasing,
        }


def default_probe_set(basis: BasisSpec, seed: int = 0, n_random: int = 8) -> np.ndarray:
    """Columns: all basis vectors plus seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    dim = basis.dim
    R = rng.standard_normal((dim, n_random)) + 1j * rng.standard_normal((dim, n_random))
    R /= np.linalg.norm(R, axis=0, keepdims=True)
    return np.hstack([np.eye(dim), R])


def essential_norm_estimate(T: OperatorMatrix, boundary_grid: Optional[Sequence[Sequence]] = None,
                            probe_set: Optional[np.ndarray] = None,
                            seed: int = 0) -> EssentialNormReport:
    """Lower profile sup_{probes} ||U_z T U_z^* f|| over boundary shells.

    The limit toward the boundary is realized as the value at the outermost
    admissible shell; the singular-value proxy reports the spectrum tail of T
    at index dim // 4 as a finite-rank indicator (truncated compact operators
    are exactly the ones whose tail has already died).
    """
    basis = T.basis
    space = basis.space
    if boundary_grid is None:
        boundary_grid = boundary_shells(space)
    if probe_set is None:
        probe_set = default_probe_set(basis, seed=seed)
    origin = 0.0 if space.nfactors == 1 else np.zeros(2)
    profile = []
    metric = []
    for shell in boundary_grid:
        best = 0.0
        for z in shell:
            Tz = conjugate_operator(T, z)
            norms = np.linalg.norm(Tz.mat @ probe_set, axis=0)
            best = max(best, float(norms.max()))
        profile.append(best)
        metric.append(float(spaces.metric(space, origin, shell[0])))
    profile = np.array(profile)
    svs = T.singular_values()
    idx = max(1, basis.dim // 4)
    return EssentialNormReport(
        shell_metric=np.array(metric),
        lower_profile=profile,
        estimate=float(profile[-1]),
        sv_proxy_index=idx,
        sv_proxy_value=float(svs[idx]) if idx < svs.size else 0.0,
        top_singular_value=float(svs[0]),
        last_two_decreasing=bool(profile[-1] < profile[-2]) if profile.size >= 2 else False,
    )


# ---------------------------------------------------------------------------
# Berezin injectivity probe

@dataclass
class InjectivityReport:
    n_modes: int
    d: int
    n_parameters: int
    n_samples: int
    rank: int
    full_rank: bool
    grid: list

    def as_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "d": self.d,
            "n_parameters": self.n_parameters,
            "n_samples": self.n_samples,
            "rank": self.rank,
            "full_rank": self.full_rank,
            "grid": [spaces.point_to_jsonable(z) for z in self.grid],
        }


def _spiral_grid(space: SpaceSpec, n_points: int):
    golden = np.pi * (3.0 - np.sqrt(5.0))
    if space.kind == KIND_FOCK:
        top = min(2.0, space.fock_probe_radius)
    else:
        top = 0.7 * space.r_max
    # the second factor uses a seeded scatter: coordinates tied to the same
    # spiral parameter satisfy algebraic relations (constant |z1|^2 + |z2|^2,
    # swapped mode pairs) that cost sample rank
    rng = np.random.default_rng(987654321)
    pts = []
    for j in range(n_points):
        r = top * np.sqrt((j + 0.5) / n_points)
        z = r * np.exp(1j * golden * j)
        if space.kind == KIND_BIDISC:
            z2 = top * np.sqrt(rng.uniform(0.05, 1.0)) * np.exp(2j * np.pi * rng.uniform())
            pts.append(np.array([z, z2]))
        else:
            pts.append(z)
    return pts


def berezin_injectivity_probe(space: SpaceSpec, d: int, n_small: int,
                              grid: Optional[Sequence] = None,
                              rank_tol: Optional[float] = None) -> InjectivityReport:
    """Rank of the linear map (truncated operator) -> (Berezin samples).

    Full rank certifies that no nonzero truncated operator has identically
    vanishing Berezin transform on the grid.
    """
    if n_small * d > 8:
        raise ValueError("small-instance probe requires n_small * d <= 8")
    probe_space = space
    if space.d != d:
        probe_space = spaces.with_component_dim(space, d)
    basis = BasisSpec(probe_space, n_small)
    if grid is None:
        grid = _spiral_grid(probe_space, max(9, basis.n_scalar ** 2 + 1))
    if len(grid) < basis.n_scalar ** 2:
        raise ValueError("grid too small to resolve all mode pairs")
    n = basis.n_scalar
    dim = basis.dim
    rows = []
    for z in grid:
        v = kernel_coeff_vector(basis, z)
        outer = np.outer(v.conj(), v)
        for i in range(d):
            for k in range(d):
                block = np.zeros((n, d, n, d), dtype=complex)
                block[:, i, :, k] = outer
                rows.append(block.reshape(dim * dim))
    A = np.array(rows)
    svs = np.linalg.svd(A, compute_uv=False)
    if rank_tol is None:
        rank_tol = max(A.shape) * np.finfo(float).eps * svs[0]
    rank = int(np.sum(svs > rank_tol))
    return InjectivityReport(n_small, d, dim * dim, A.shape[0], rank,
                             rank == dim * dim, list(grid))
