"""Operator assembly on the truncated basis.

All operators are dense matrices on the flattened index (mode m, component k)
-> m * d + k.  Scalar constructions tensor with I_d via np.kron, which matches
that ordering.

Toeplitz assembly T_F = P M_F splits the symbol into a smooth part sampled on
the global rule and ball-indicator parts integrated on region-aligned rules
(sampling an indicator on the global grid would lose ~3 digits).

Translation operators U_z f = (f o phi_z) k_z are compressions of unitaries;
the compression is assembled on an alias-safe rule sized from the modal
spread of phi_z.  Top basis modes unavoidably leak outside any fixed
truncation window for z != 0, which is why every U_z comes with a per-column
leakage certificate (1 - retained column mass) from which identity-quality
statements are scoped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import spaces
from .coeffs import BasisSpec, CoeffFunction, from_flat, scalar_basis_matrix, project_grid_function
from .quadrature import QuadratureRule, ball_rule, build_rule, metric_ball_euclidean
from .spaces import KIND_BIDISC, KIND_DISC, KIND_FOCK, SpaceSpec


# ---------------------------------------------------------------------------
# symbols

@dataclass(frozen=True)
class BallPart:
    """value * indicator of the euclidean disc D(center, radius), one factor only."""
    center: complex
    radius: float
    value: np.ndarray  # (d, d)


@dataclass
class MatrixSymbol:
    """d x d matrix symbol: optional smooth part plus ball-indicator parts."""

    space: SpaceSpec
    smooth: Optional[Callable[[np.ndarray], np.ndarray]] = None  # points -> (n, d, d)
    balls: List[BallPart] = field(default_factory=list)
    poly: Optional[Dict[Tuple[int, int], Dict[tuple, complex]]] = None
    label: str = ""

    def eval(self, points) -> np.ndarray:
        pts = spaces.as_points(self.space, points)
        n = pts.shape[0] if self.space.nfactors == 1 else pts.reshape(-1, 2).shape[0]
        d = self.space.d
        out = np.zeros((n, d, d), dtype=complex)
        if self.smooth is not None:
            out += self.smooth(pts)
        for b in self.balls:
            inside = np.abs(pts - b.center) <= b.radius
            out += inside[:, None, None] * b.value[None, :, :]
        return out

    def sup_norm(self, rule: QuadratureRule) -> float:
        vals = self.eval(rule.nodes)
        return float(np.max(np.linalg.norm(vals, 2, axis=(1, 2))))

    def adjoint_values(self, points) -> np.ndarray:
        return np.conj(np.swapaxes(self.eval(points), 1, 2))


def _compile_poly(space: SpaceSpec, entries: Dict[Tuple[int, int], Dict[tuple, complex]]):
    d = space.d

    def smooth(pts: np.ndarray) -> np.ndarray:
        if space.nfactors == 2:
            p = pts.reshape(-1, 2)
            n = p.shape[0]
        else:
            p = pts.reshape(-1)
            n = p.shape[0]
        out = np.zeros((n, d, d), dtype=complex)
        for (i, k), terms in entries.items():
            acc = np.zeros(n, dtype=complex)
            for powers, c in terms.items():
                if space.nfactors == 2:
                    a1, b1, a2, b2 = powers
                    acc += c * p[:, 0] ** a1 * np.conj(p[:, 0]) ** b1 \
                        * p[:, 1] ** a2 * np.conj(p[:, 1]) ** b2
                else:
                    a, b = powers
                    acc += c * p ** a * np.conj(p) ** b
            out[:, i, k] = acc
        return out

    return smooth


def poly_symbol(space: SpaceSpec, entries: Dict[Tuple[int, int], Dict[tuple, complex]],
                label: str = "") -> MatrixSymbol:
    """Polynomial symbol: entries[(i, k)] maps power tuples to coefficients.

    Power tuples are (a, b) for z^a conj(z)^b on one-factor spaces and
    (a1, b1, a2, b2) on the bidisc.
    """
    return MatrixSymbol(space, smooth=_compile_poly(space, entries), poly=dict(entries), label=label)


def constant_symbol(space: SpaceSpec, matrix, label: str = "") -> MatrixSymbol:
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (space.d, space.d):
        raise ValueError("constant symbol needs a d x d matrix")
    entries = {
        (i, k): {((0, 0) if space.nfactors == 1 else (0, 0, 0, 0)): m[i, k]}
        for i in range(space.d) for k in range(space.d) if m[i, k] != 0
    }
    sym = poly_symbol(space, entries, label=label)
    return sym


def ball_indicator_symbol(space: SpaceSpec, center: complex, radius: float, matrix,
                          ball_metric: str = "euclidean", label: str = "") -> MatrixSymbol:
    if space.nfactors != 1:
        raise ValueError("ball symbols are single-factor")
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (space.d, space.d):
        raise ValueError("ball symbol needs a d x d matrix")
    if ball_metric == "invariant":
        center, radius = metric_ball_euclidean(space, center, radius)
    return MatrixSymbol(space, balls=[BallPart(complex(center), float(radius), m)], label=label)


def _mobius_circle_image(z: complex, center: complex, radius: float):
    """Image of the circle |w - center| = radius under phi_z on the disc."""
    pts = [center + radius * np.exp(2j * np.pi * j / 3) for j in range(3)]
    q = [(z - p) / (1 - np.conj(z) * p) for p in pts]
    num = (abs(q[0]) ** 2) * (q[1] - q[2]) + (abs(q[1]) ** 2) * (q[2] - q[0]) + (abs(q[2]) ** 2) * (q[0] - q[1])
    den = np.conj(q[0]) * (q[1] - q[2]) + np.conj(q[1]) * (q[2] - q[0]) + np.conj(q[2]) * (q[0] - q[1])
    c = num / den
    return complex(c), float(abs(q[0] - c))


def pullback_symbol(symbol: MatrixSymbol, z) -> MatrixSymbol:
    """Symbol composed with phi_z.  Ball parts stay exact balls."""
    space = symbol.space
    balls = []
    for b in symbol.balls:
        if space.kind == KIND_FOCK:
            balls.append(BallPart(complex(z) - b.center, b.radius, b.value))
        elif space.kind == KIND_DISC:
            c, r = _mobius_circle_image(complex(z), b.center, b.radius)
            balls.append(BallPart(c, r, b.value))
        else:
            raise ValueError("ball pullback is single-factor")
    smooth = None
    if symbol.smooth is not None:
        base = symbol.smooth

        def smooth(pts, _base=base, _z=z):
            return _base(spaces.involution(space, _z, pts))

    return MatrixSymbol(space, smooth=smooth, balls=balls,
                        label=f"{symbol.label or 'symbol'}@phi_{z}")


# ---------------------------------------------------------------------------
# operator matrices

@dataclass
class OperatorMatrix:
    basis: BasisSpec
    mat: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.basis.dim
        self.mat = np.asarray(self.mat, dtype=complex)
        if self.mat.shape != (n, n):
            raise ValueError(f"matrix shape {self.mat.shape}, expected ({n}, {n})")

    @property
    def dim(self) -> int:
        return self.basis.dim

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.mat @ other.mat)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.mat + other.mat)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.mat - other.mat)

    def __rmul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, scalar * self.mat)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.mat.conj().T, label=f"{self.label}*")

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat, 2))

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.mat, compute_uv=False)

    def apply(self, f: CoeffFunction) -> CoeffFunction:
        return from_flat(self.basis, self.mat @ f.flat)


def identity_operator(basis: BasisSpec) -> OperatorMatrix:
    return OperatorMatrix(basis, np.eye(basis.dim), label="I")


def scalar_block_to_operator(basis: BasisSpec, scalar: np.ndarray, label: str = "") -> OperatorMatrix:
    """Lift a scalar-mode matrix to the full space as scalar (x) I_d."""
    return OperatorMatrix(basis, np.kron(scalar, np.eye(basis.space.d)), label=label)


# ---------------------------------------------------------------------------
# Toeplitz operators

def _scalar_gram_with_weight(basis: BasisSpec, rule: QuadratureRule, wvals: np.ndarray) -> np.ndarray:
    E = scalar_basis_matrix(basis, rule.nodes)
    return (E.conj() * (rule.sigma_weights * wvals)[None, :]) @ E.T


def toeplitz_matrix(basis: BasisSpec, rule: QuadratureRule, symbol: MatrixSymbol) -> OperatorMatrix:
    """T_F = P M_F on the truncated space.

    Polynomial entries are exact whenever radial exactness (degree in t up to
    2*radial_order - 1) and angular separation (frequency spread less than
    angular_order) hold; ball parts are assembled on their own region rules.
    """
    d = basis.space.d
    n = basis.n_scalar
    T4 = np.zeros((n, d, n, d), dtype=complex)
    if symbol.smooth is not None:
        vals = symbol.smooth(rule.nodes)
        E = scalar_basis_matrix(basis, rule.nodes)
        Ew = E.conj() * rule.sigma_weights[None, :]
        T4 += np.einsum("an,nik,bn->aibk", Ew, vals, E, optimize=True)
    for b in symbol.balls:
        brule = ball_rule(basis.space, b.center, b.radius,
                          radial_order=max(rule.radial_order, basis.n_modes + 8),
                          angular_order=max(rule.angular_order, 2 * basis.n_modes + 8))
        Eb = scalar_basis_matrix(basis, brule.nodes)
        scalar = (Eb.conj() * brule.sigma_weights[None, :]) @ Eb.T
        T4 += np.einsum("ab,ik->aibk", scalar, b.value)
    return OperatorMatrix(basis, T4.reshape(basis.dim, basis.dim),
                          label=f"T[{symbol.label or 'F'}]")


@dataclass
class PointMassMeasure:
    """Finite sum of matrix-weighted point masses sum_a M_a delta_{p_a}."""

    points: np.ndarray
    matrices: np.ndarray  # (n_atoms, d, d)

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=complex))
        self.matrices = np.asarray(self.matrices, dtype=complex)
        if self.matrices.ndim == 2:
            self.matrices = self.matrices[None, :, :]
        if self.matrices.shape[0] != self.points.shape[0]:
            raise ValueError("one weight matrix per atom")


def toeplitz_measure_matrix(basis: BasisSpec, measure: PointMassMeasure) -> OperatorMatrix:
    """Toeplitz operator of a matrix-valued point-mass measure.

    (T_mu f)(z) = int <K_w(z) . , .> f(w) d mu(w) collapses to
    sum_a conj(e_m'(p_a)) M_a e_m(p_a) on basis elements.
    """
    E = scalar_basis_matrix(basis, measure.points)  # (n_scalar, n_atoms)
    T4 = np.einsum("aj,jik,bj->aibk", E.conj(), measure.matrices, E)
    return OperatorMatrix(basis, T4.reshape(basis.dim, basis.dim), label="T[mu]")


# ---------------------------------------------------------------------------
# translation operators

_translation_cache: dict = {}


def _space_cache_key(space: SpaceSpec):
    return (space.kind, space.alpha, space.alpha2, space.d)


def _modal_spread(space: SpaceSpec, r: float, n_modes: int) -> int:
    """Upper estimate of the Taylor support of U_z applied to the top mode."""
    if space.kind == KIND_DISC:
        growth = (1.0 + r) / max(1.0 - r, 1e-3)
        return int(np.ceil((n_modes + 3) * growth)) + 16
    # fock: displaced mode m spreads by O(|z| sqrt(m)) around m + |z|^2
    return int(np.ceil(n_modes + r * r + 10.0 * r * np.sqrt(n_modes) + 16))


def _translation_rule(space: SpaceSpec, r: float, n_modes: int) -> QuadratureRule:
    spread = _modal_spread(space, r, n_modes)
    na = int(min(2048, 2 ** np.ceil(np.log2(2 * (spread + n_modes) + 8))))
    nr = int(max(40, (spread + n_modes) // 4 + 8))
    return build_rule(space, nr, na)


def _scalar_translation(space: SpaceSpec, n_modes: int, z: complex,
                        rule: Optional[QuadratureRule]) -> np.ndarray:
    basis1 = BasisSpec(space, n_modes)
    if rule is None:
        rule = _translation_rule(space, abs(z), n_modes)
    phi = spaces.involution(space, z, rule.nodes)
    kz = spaces.normalized_kernel_eval(space, z, rule.nodes)
    E_out = scalar_basis_matrix(basis1, rule.nodes)
    E_in = scalar_basis_matrix(basis1, phi)
    return (E_out.conj() * rule.sigma_weights[None, :]) @ (E_in * kz[None, :]).T


def translation_matrix(basis: BasisSpec, z, rule: Optional[QuadratureRule] = None,
                       use_cache: bool = True) -> OperatorMatrix:
    """Compression of U_z f = (f o phi_z) k_z; block diagonal over components.

    Assembled on an alias-safe rule sized from the modal spread at |z| unless
    an explicit rule is passed.
    """
    space = basis.space
    spaces.check_probe_point(space, z)
    if space.kind == KIND_BIDISC:
        z = spaces.as_points(space, z)
        f0, f1 = space.factor(0), space.factor(1)
        key = (_space_cache_key(space), basis.n_modes, complex(z[0]), complex(z[1]), rule is None)
        if use_cache and rule is None and key in _translation_cache:
            scalar = _translation_cache[key]
        else:
            u1 = _scalar_translation(f0, basis.n_modes, complex(z[0]), None)
            u2 = _scalar_translation(f1, basis.n_modes, complex(z[1]), None)
            scalar = np.kron(u1, u2)
            if use_cache and rule is None:
                _translation_cache[key] = scalar
        return scalar_block_to_operator(basis, scalar, label=f"U[{z}]")
    z = complex(z)
    key = (_space_cache_key(space), basis.n_modes, z, rule is None)
    if use_cache and rule is None and key in _translation_cache:
        scalar = _translation_cache[key]
    else:
        scalar = _scalar_translation(space, basis.n_modes, z, rule)
        if use_cache and rule is None:
            _translation_cache[key] = scalar
    return scalar_block_to_operator(basis, scalar, label=f"U[{z}]")


def clear_translation_cache() -> None:
    _translation_cache.clear()


@dataclass
class TranslationCertificate:
    """Per-column leakage of the compressed U_z on scalar modes.

    tails[m] = 1 - retained mass of U_z e_m inside the truncation window; the
    certified prefix keeps every tail below tau.  Identity-quality statements
    (unitarity, involutivity, covariance) hold on the certified prefix up to
    ~sqrt(tau) and are vacuous outside it: the modal spread of phi_z pushes
    top modes out of any fixed window.
    """

    z: complex
    tau: float
    tails: np.ndarray
    certified_modes: int

    @property
    def residual_scale(self) -> float:
        return float(np.sqrt(max(self.tau, 0.0)))


def translation_certificate(basis: BasisSpec, z, tau: float = 1e-12) -> TranslationCertificate:
    space = basis.space
    if space.kind == KIND_BIDISC:
        z = spaces.as_points(space, z)
        c1 = translation_certificate(BasisSpec(space.factor(0), basis.n_modes), complex(z[0]), tau)
        c2 = translation_certificate(BasisSpec(space.factor(1), basis.n_modes), complex(z[1]), tau)
        tails = np.add.outer(c1.tails, c2.tails).ravel()
        tails = np.minimum(tails, 1.0)
        m = min(c1.certified_modes, c2.certified_modes)
        return TranslationCertificate(complex(z[0]), tau, tails, m)
    z = complex(z)
    scalar = _scalar_translation(space, basis.n_modes, z, None)
    tails = np.clip(1.0 - np.sum(np.abs(scalar) ** 2, axis=0), 0.0, 1.0)
    certified = 0
    for m in range(basis.n_modes):
        if tails[m] <= tau:
            certified = m + 1
        else:
            break
    return TranslationCertificate(z, tau, tails, certified)


def certified_projector(basis: BasisSpec, cert: TranslationCertificate) -> OperatorMatrix:
    """Orthogonal projection onto the certified scalar-mode prefix (all components)."""
    mask = np.zeros(basis.n_scalar)
    if basis.space.kind == KIND_BIDISC:
        m = cert.certified_modes
        grid = np.zeros((basis.n_modes, basis.n_modes))
        grid[:m, :m] = 1.0
        mask = grid.ravel()
    else:
        mask[: cert.certified_modes] = 1.0
    return scalar_block_to_operator(basis, np.diag(mask), label="P_cert")


def conjugate_operator(T: OperatorMatrix, z, rule: Optional[QuadratureRule] = None) -> OperatorMatrix:
    """T^z = U_z T U_z^*."""
    U = translation_matrix(T.basis, z, rule=rule)
    return OperatorMatrix(T.basis, U.mat @ T.mat @ U.mat.conj().T, label=f"{T.label}^{z}")


# ---------------------------------------------------------------------------
# component truncations, Hankel, rank-one

def truncation_operators(basis: BasisSpec, d_prime: int) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """(projection onto first d' components, projection onto the rest)."""
    d = basis.space.d
    if not 0 <= d_prime <= d:
        raise ValueError("d_prime out of range")
    mask = np.zeros(d)
    mask[:d_prime] = 1.0
    upper = np.kron(np.eye(basis.n_scalar), np.diag(mask))
    lower = np.eye(basis.dim) - upper
    return (OperatorMatrix(basis, upper, label=f"I^({d_prime})"),
            OperatorMatrix(basis, lower, label=f"I_({d_prime})"))


@dataclass
class HankelResult:
    residual_samples: np.ndarray  # (n_nodes, d)
    norm: float
    projected: CoeffFunction


def hankel_apply(basis: BasisSpec, rule: QuadratureRule, symbol: MatrixSymbol,
                 f: CoeffFunction) -> HankelResult:
    """H_F f = (I - P)(F f), realized on the quadrature grid.

    Ball parts are sampled pointwise here, so indicator symbols carry the
    grid's discontinuity error; polynomial symbols are clean.
    """
    from .coeffs import eval_coeffs
    fvals = eval_coeffs(f, rule.nodes)                      # (n, d)
    Fvals = symbol.eval(rule.nodes)                         # (n, d, d)
    prod = np.einsum("nik,nk->ni", Fvals, fvals)
    proj = project_grid_function(basis, rule, prod)
    resid = prod - eval_coeffs(proj, rule.nodes)
    nrm = float(np.sqrt(np.real(np.sum(rule.sigma_weights[:, None] * np.abs(resid) ** 2))))
    return HankelResult(resid, nrm, proj)


def rank_one(f: CoeffFunction, g: CoeffFunction) -> OperatorMatrix:
    """f (x) g: h -> <h, g> f."""
    if f.basis.dim != g.basis.dim:
        raise ValueError("mismatched bases")
    return OperatorMatrix(f.basis, np.outer(f.flat, np.conj(g.flat)), label="f(x)g")


def _analytic_component_entry(basis: BasisSpec, scalar_coeffs: np.ndarray, conjugate: bool) -> Dict[tuple, complex]:
    """Monomial power dict for an analytic polynomial given by basis coefficients."""
    from .coeffs import basis_normalizer
    c = basis_normalizer(basis)
    entry: Dict[tuple, complex] = {}
    if basis.space.nfactors == 2:
        n = basis.n_modes
        for idx, coeff in enumerate(scalar_coeffs):
            if coeff == 0:
                continue
            m1, m2 = divmod(idx, n)
            mono = coeff * c[idx]
            key = (0, m1, 0, m2) if conjugate else (m1, 0, m2, 0)
            entry[key] = entry.get(key, 0.0) + (np.conj(mono) if conjugate else mono)
        return entry
    for m, coeff in enumerate(scalar_coeffs):
        if coeff == 0:
            continue
        mono = coeff * c[m]
        key = (0, m) if conjugate else (m, 0)
        entry[key] = entry.get(key, 0.0) + (np.conj(mono) if conjugate else mono)
    return entry


def rank_one_toeplitz_sum(basis: BasisSpec, rule: QuadratureRule,
                          f: CoeffFunction, g: CoeffFunction) -> OperatorMatrix:
    """Factorization of f (x) g through Toeplitz operators and a point mass.

    sum_{i,k} T[f_i E_ii] T[||K_0||^-1 delta_0 E_ii] T[conj(g_k) E_ii] T[E_ik]
    applied to h evaluates the analytic pairing <h, g> and reinstates f, one
    component pair at a time.
    """
    space = basis.space
    d = space.d
    dim = basis.dim
    origin = 0.0 if space.nfactors == 1 else np.zeros(2, dtype=complex)
    k0 = float(spaces.kernel_norm(space, origin))
    total = np.zeros((dim, dim), dtype=complex)
    for i in range(d):
        Eii = np.zeros((d, d)); Eii[i, i] = 1.0
        T_fi = toeplitz_matrix(basis, rule, poly_symbol(
            space, {(i, i): _analytic_component_entry(basis, f.coeffs[:, i], conjugate=False)}))
        T_delta = toeplitz_measure_matrix(basis, PointMassMeasure(
            np.atleast_1d(origin) if space.nfactors == 1 else origin[None, :], Eii[None, :, :] / k0))
        for k in range(d):
            T_gk = toeplitz_matrix(basis, rule, poly_symbol(
                space, {(i, i): _analytic_component_entry(basis, g.coeffs[:, k], conjugate=True)}))
            Eik = np.zeros((d, d)); Eik[i, k] = 1.0
            T_ik = np.kron(np.eye(basis.n_scalar), Eik)  # constant symbols need no quadrature
            total += T_fi.mat @ T_delta.mat @ T_gk.mat @ T_ik
    return OperatorMatrix(basis, total, label="sum T...T")
