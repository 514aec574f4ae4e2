"""Batch command-line interface.

Heavy modules are imported inside the runners so that --threads can pin the
BLAS thread count before numpy first loads.  Every command reads one JSON
config, runs to completion, then writes a JSON and a CSV report atomically;
precondition violations exit with code 2 and a structured JSON error on
stderr, leaving no partial files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable, Dict, List, Optional, Tuple

COMMANDS = (
    "kernel", "toeplitz", "berezin", "rkt", "essnorm", "rf",
    "schur", "covering", "localize", "rank1", "verify-axioms",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berglab",
        description="numerical laboratory for vector-valued Bergman-type spaces",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="path to a JSON config")
    parser.add_argument("--out", default="reports", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="BLAS/OpenMP thread count")
    parser.add_argument("--resolution-scale", type=float, default=1.0,
                        help="multiplies quadrature orders")
    return parser


def _apply_threads(n: Optional[int]) -> None:
    if n is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)


# ---------------------------------------------------------------------------
# shared helpers (imported lazily by runners)

def _context(cfg, scale: float):
    import numpy as np

    from .coeffs import BasisSpec
    from .quadrature import build_rule

    radial = cfg.radial_order
    angular = cfg.angular_order
    if scale != 1.0:
        from .quadrature import (BIDISC_ANGULAR_ORDER, BIDISC_RADIAL_ORDER,
                                 DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_ORDER)
        if cfg.space.nfactors == 2:
            base_r, base_a = BIDISC_RADIAL_ORDER, BIDISC_ANGULAR_ORDER
        else:
            base_r, base_a = DEFAULT_RADIAL_ORDER, DEFAULT_ANGULAR_ORDER
        radial = max(2, int(np.ceil((radial or base_r) * scale)))
        angular = max(4, int(np.ceil((angular or base_a) * scale)))
    rule = build_rule(cfg.space, radial, angular)
    basis = BasisSpec(cfg.space, cfg.n_modes)
    return basis, rule


def _operator(cfg, basis, rule):
    from .config import ConfigError
    from .operators import identity_operator, toeplitz_matrix

    block = cfg.operator or {"type": "identity"}
    kind = block.get("type")
    if kind == "identity":
        return identity_operator(basis)
    if kind == "toeplitz":
        return toeplitz_matrix(basis, rule, cfg.symbol(block["symbol"]))
    if kind == "toeplitz_product":
        out = None
        for name in block["symbols"]:
            T = toeplitz_matrix(basis, rule, cfg.symbol(name))
            out = T if out is None else out @ T
        return out
    raise ConfigError(f"unknown operator type {kind!r}")


def _zgrid(cfg, basis):
    from .analysis import default_probe_grid

    if cfg.z_grid is not None:
        return cfg.points(cfg.z_grid)
    return default_probe_grid(cfg.space)


def _fmt_point(space, z):
    import numpy as np

    z = np.asarray(z, dtype=complex)
    if z.shape == ():
        return f"{float(z.real):.6g}{float(z.imag):+.6g}j"
    return ";".join(_fmt_point(space.factor(i), z[..., i]) for i in range(2))


# ---------------------------------------------------------------------------
# runners: each returns (claim_id, payload, csv_header, csv_rows, exit_code)

def _run_kernel(cfg, args) -> Tuple[str, dict, list, list, int]:
    from . import spaces

    space = cfg.space
    pts = cfg.points(cfg.kernel_points) if cfg.kernel_points else _zgrid(cfg, None)
    rows, table = [], []
    for z in pts:
        spaces.check_probe_point(space, z)
        for w in pts:
            val = complex(spaces.kernel_eval(space, z, w))
            entry = {
                "z": z, "w": w, "kernel": val,
                "kernel_norm_z": float(spaces.kernel_norm(space, z)),
                "metric": float(spaces.metric(space, z, w)),
                "normalized_pairing": float(spaces.normalized_pairing(space, z, w)),
            }
            table.append(entry)
            rows.append([_fmt_point(space, z), _fmt_point(space, w), val.real, val.imag,
                         entry["kernel_norm_z"], entry["metric"], entry["normalized_pairing"]])
    payload = {"points": pts, "table": table}
    header = ["z", "w", "kernel_re", "kernel_im", "kernel_norm_z", "metric",
              "normalized_pairing"]
    return "axioms", payload, header, rows, 0


def _run_toeplitz(cfg, args):
    from .config import ConfigError

    if cfg.operator is None:
        raise ConfigError("toeplitz command needs an operator block")
    basis, rule = _context(cfg, args.resolution_scale)
    T = _operator(cfg, basis, rule)
    svs = T.singular_values()
    payload = {
        "dim": T.dim,
        "n_modes": basis.n_modes,
        "component_dim": basis.space.d,
        "norm": T.norm(),
        "singular_values": svs,
        "matrix": {"re": T.mat.real, "im": T.mat.imag},
    }
    rows = [[i, j, T.mat[i, j].real, T.mat[i, j].imag]
            for i in range(T.dim) for j in range(T.dim)]
    return "toeplitz-calculus", payload, ["row", "col", "re", "im"], rows, 0


def _run_berezin(cfg, args):
    from .analysis import berezin_decay_profile

    basis, rule = _context(cfg, args.resolution_scale)
    T = _operator(cfg, basis, rule)
    prof = berezin_decay_profile(
        T, radii=cfg.radii, angles=cfg.angles, threshold=cfg.berezin_threshold)
    payload = prof.as_dict()
    payload["matrices"] = prof.matrices
    rows = []
    for a, r in enumerate(prof.radii):
        for b, th in enumerate(prof.angles):
            for i in range(basis.space.d):
                for k in range(basis.space.d):
                    v = prof.matrices[a, b, i, k]
                    rows.append([r, th, i, k, v.real, v.imag])
    header = ["radius", "angle", "i", "k", "re", "im"]
    return "berezin-transform", payload, header, rows, 0


def _run_rkt(cfg, args):
    from .analysis import (hankel_rkt_check, rkt_boundedness_check,
                           rkt_product_check, rkt_toeplitz_symbol_check)
    from .config import ConfigError

    basis, rule = _context(cfg, args.resolution_scale)
    zg = _zgrid(cfg, basis)
    T = _operator(cfg, basis, rule)
    reports = {}
    b1, b2 = rkt_boundedness_check(basis, rule, T, p=cfg.p, z_grid=zg)
    reports["boundedness"] = [b1.as_dict(), b2.as_dict()]
    block = cfg.operator or {}
    names: List[str] = []
    if block.get("type") == "toeplitz":
        names = [block["symbol"]]
    elif block.get("type") == "toeplitz_product":
        names = list(block["symbols"])
    if names:
        F = cfg.symbol(names[0])
        s1, s2 = rkt_toeplitz_symbol_check(rule, F, p=cfg.p, z_grid=zg)
        reports["symbol"] = [s1.as_dict(), s2.as_dict()]
        reports["hankel"] = hankel_rkt_check(rule, F, p=cfg.p, z_grid=zg).as_dict()
        if len(names) >= 2:
            try:
                p1, p2 = rkt_product_check(rule, F, cfg.symbol(names[1]),
                                           p=cfg.p, z_grid=zg)
                reports["product"] = [p1.as_dict(), p2.as_dict()]
            except ValueError as exc:
                reports["product_skipped"] = str(exc)
    rows = []
    def _expand(tag, rep_dict):
        for zi, per_z in enumerate(rep_dict["values"]):
            for ui, val in enumerate(per_z):
                rows.append([tag, rep_dict["label"], zi, ui, val])
    for tag, entry in reports.items():
        if isinstance(entry, list):
            for rep in entry:
                _expand(tag, rep)
        elif isinstance(entry, dict):
            _expand(tag, entry)
    header = ["check", "side", "z_index", "unit_index", "value"]
    return "boundedness-integrals", reports, header, rows, 0


def _run_essnorm(cfg, args):
    from .analysis import boundary_shells, essential_norm_estimate

    basis, rule = _context(cfg, args.resolution_scale)
    T = _operator(cfg, basis, rule)
    shells = boundary_shells(cfg.space, radii=cfg.shells)
    rep = essential_norm_estimate(T, boundary_grid=shells, seed=cfg.seed)
    payload = rep.as_dict()
    payload["threshold"] = cfg.essnorm_threshold
    payload["below_threshold"] = rep.estimate < cfg.essnorm_threshold
    rows = [[i, m, v] for i, (m, v) in
            enumerate(zip(rep.shell_metric, rep.lower_profile))]
    return "essential-norm", payload, ["shell", "metric_distance", "lower_value"], rows, 0


def _run_rf(cfg, args):
    import numpy as np

    from .config import ConfigError
    from .quadrature import rudin_forelli

    basis, rule = _context(cfg, args.resolution_scale)
    r, s = float(cfg.rf.get("r", 3.0)), float(cfg.rf.get("s", 3.0))
    zg = _zgrid(cfg, basis)
    rep = rudin_forelli(cfg.space, rule, zg, r, s)
    payload = rep.as_dict()
    rows = [[zi, float(rep.I[zi]), float(rep.J[zi]), float(rep.ratio[zi])]
            for zi in range(len(zg))]
    return "kernel-power-integrals", payload, ["z_index", "I", "J", "ratio"], rows, 0


def _run_schur(cfg, args):
    import numpy as np

    from .config import ConfigError
    from .quadrature import MatrixKernelSample, discretized_norm, schur_test

    if not cfg.schur_kernel_file:
        raise ConfigError("schur command needs schur_kernel_file in the config")
    try:
        with open(cfg.schur_kernel_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read kernel file: {exc}")
    try:
        sample = MatrixKernelSample(
            np.asarray(data["values"], dtype=float),
            np.asarray(data["mu"], dtype=float),
            np.asarray(data["nu"], dtype=float),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad kernel file: {exc}")
    h_x = np.asarray(data["h_x"], dtype=float) if "h_x" in data else None
    h_y = np.asarray(data["h_y"], dtype=float) if "h_y" in data else None
    p = float(data.get("p", 2.0))
    result = schur_test(sample, p=p, h_x=h_x, h_y=h_y)
    result["discretized_norm"] = discretized_norm(sample)
    result["dominates"] = bool(result["bound"] >= result["discretized_norm"] - 1e-12)
    rows = [[result["C1"], result["C2"], result["bound"],
             result["discretized_norm"], result["p"]]]
    header = ["C1", "C2", "bound", "discretized_norm", "p"]
    return "schur-test", result, header, rows, 0


def _run_covering(cfg, args):
    from .covering import build_covering

    basis, rule = _context(cfg, args.resolution_scale)
    summaries, rows = [], []
    for r in cfg.covering_r:
        c = build_covering(cfg.space, r, rule)
        diams = c.cell_diameters()
        counts = c.cell_node_counts()
        hist = {}
        for m in c.multiplicity_per_node():
            hist[int(m)] = hist.get(int(m), 0) + 1
        summaries.append({
            "r": r, "n_cells": c.n_cells, "multiplicity": c.multiplicity,
            "max_diameter": float(diams.max()), "diameter_bound": 4.0 * r,
            "diameter_ok": bool(diams.max() <= 4.0 * r + 1e-9),
            "multiplicity_histogram": hist,
        })
        for j, cell in enumerate(c.cells):
            rows.append([r, j, cell.get("kind"), json.dumps(cell, sort_keys=True),
                         int(counts[j]), float(diams[j])])
    ok = all(s["diameter_ok"] for s in summaries)
    payload = {"coverings": summaries, "all_diameters_ok": ok}
    header = ["r", "cell", "kind", "bounds", "node_count", "diameter"]
    return "covering", payload, header, rows, 0 if ok else 1


def _run_localize(cfg, args):
    from .covering import build_covering, localization_error

    basis, rule = _context(cfg, args.resolution_scale)
    T = _operator(cfg, basis, rule)
    curve = []
    for r in cfg.covering_r:
        c = build_covering(cfg.space, r, rule)
        err = localization_error(T, c)
        curve.append({"r": r, "error": err, "n_cells": c.n_cells,
                      "multiplicity": c.multiplicity})
    errs = [pt["error"] for pt in curve]
    payload = {"curve": curve,
               "non_increasing": all(errs[i] >= errs[i + 1] - 1e-12
                                     for i in range(len(errs) - 1))}
    rows = [[pt["r"], pt["n_cells"], pt["multiplicity"], pt["error"]] for pt in curve]
    return "localization", payload, ["r", "n_cells", "multiplicity", "error"], rows, 0


def _run_rank1(cfg, args):
    import numpy as np

    from .coeffs import random_polynomial
    from .operators import rank_one, rank_one_toeplitz_sum

    basis, rule = _context(cfg, args.resolution_scale)
    n_pairs = int(cfg.rank1.get("n_pairs", 50))
    degree = int(cfg.rank1.get("degree", 4))
    rng = np.random.default_rng(cfg.seed)
    devs = []
    for _ in range(n_pairs):
        f = random_polynomial(basis, rng, degree)
        g = random_polynomial(basis, rng, degree)
        S = rank_one_toeplitz_sum(basis, rule, f, g)
        devs.append(float((S - rank_one(f, g)).norm()))
    payload = {"n_pairs": n_pairs, "degree": degree,
               "max_deviation": max(devs), "deviations": devs}
    rows = [[i, v] for i, v in enumerate(devs)]
    return "rank-one-factorization", payload, ["pair", "deviation"], rows, 0


def _run_verify_axioms(cfg, args):
    import numpy as np

    from . import spaces
    from .coeffs import scalar_basis_matrix
    from .operators import (certified_projector, translation_certificate,
                            translation_matrix)
    from .quadrature import integrate_lambda, integrate_sigma

    basis, rule = _context(cfg, args.resolution_scale)
    space = cfg.space
    rng = np.random.default_rng(cfg.seed)
    checks = []

    def record(name, value, tol):
        checks.append({"name": name, "value": float(value), "tol": tol,
                       "pass": bool(value <= tol)})

    def rand_points(n):
        lim = 0.8 * spaces.probe_radius_max(space)
        pts = lim * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        if space.nfactors == 2:
            pts2 = lim * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
            return np.stack([pts, pts2], axis=-1)
        return pts

    record("sigma_probability",
           abs(integrate_sigma(rule, np.ones(rule.n_nodes)) - 1.0), 1e-12)

    E = scalar_basis_matrix(basis, rule.nodes)
    G = (E.conj() * rule.sigma_weights[None, :]) @ E.T
    record("basis_orthonormality", np.abs(G - np.eye(basis.n_scalar)).max(), 1e-10)

    z, w = rand_points(400), rand_points(400)
    record("involutivity",
           np.max(np.abs(spaces.involution(space, z, spaces.involution(space, z, w)) - w)),
           1e-12)
    record("kernel_involution_identity",
           np.max(np.abs(spaces.normalized_pairing(space, z, w)
                         * spaces.kernel_norm(space, spaces.involution(space, z, w)) - 1.0)),
           1e-10)
    a, u, v = rand_points(200), rand_points(200), rand_points(200)
    record("metric_invariance",
           np.max(np.abs(spaces.metric(space, spaces.involution(space, a, u),
                                       spaces.involution(space, a, v))
                         - spaces.metric(space, u, v))), 1e-10)
    record("cauchy_schwarz_pairing",
           max(0.0, float(np.max(spaces.normalized_pairing(space, z, w))) - 1.0), 1e-12)

    # kernel norm must grow along a ray toward the boundary of the region
    ray = np.linspace(0.2, 1.0, 8) * spaces.probe_radius_max(space)
    ray_pts = [r if space.nfactors == 1 else np.array([r, r]) for r in ray]
    norms = np.array([float(spaces.kernel_norm(space, p)) for p in ray_pts])
    record("kernel_norm_growth", max(0.0, float(np.max(norms[:-1] - norms[1:]))), 0.0)

    # invariance of the kernel-weighted measure under the involutions
    if space.nfactors == 1:
        test = (1.0 - np.abs(rule.nodes) ** 2) ** 3 if space.kind == spaces.KIND_DISC \
            else np.exp(-np.abs(rule.nodes) ** 2)
        base = integrate_lambda(rule, test)
        worst = 0.0
        for zz in [0.2, 0.35 * np.exp(1j)]:
            zz = zz * spaces.probe_radius_max(space)
            moved = spaces.involution(space, zz, rule.nodes)
            mtest = (1.0 - np.abs(moved) ** 2) ** 3 if space.kind == spaces.KIND_DISC \
                else np.exp(-np.abs(moved) ** 2)
            worst = max(worst, abs(integrate_lambda(rule, mtest) - base))
        record("lambda_invariance", worst, 1e-6)

    # translation identities on certified modes
    zg = [p for p in _zgrid(cfg, basis)
          if spaces.metric(space, 0.0 if space.nfactors == 1 else np.zeros(2), p) > 0]
    worst_u, worst_i = 0.0, 0.0
    for zz in zg:
        cert = translation_certificate(basis, zz)
        if cert.certified_modes == 0:
            continue
        U = translation_matrix(basis, zz)
        P = certified_projector(basis, cert).mat
        I = np.eye(basis.dim)
        worst_u = max(worst_u, np.linalg.norm(P @ (U.mat.conj().T @ U.mat - I) @ P, 2))
        worst_i = max(worst_i, np.linalg.norm(P @ (U.mat @ U.mat - I) @ P, 2))
    record("translation_unitarity_certified", worst_u, 1e-6)
    record("translation_involutivity_certified", worst_i, 1e-6)

    all_pass = all(c["pass"] for c in checks)
    payload = {"checks": checks, "all_pass": all_pass}
    rows = [[c["name"], c["value"], c["tol"], c["pass"]] for c in checks]
    return "axioms", payload, ["check", "value", "tol", "pass"], rows, 0 if all_pass else 1


_RUNNERS: Dict[str, Callable] = {
    "kernel": _run_kernel,
    "toeplitz": _run_toeplitz,
    "berezin": _run_berezin,
    "rkt": _run_rkt,
    "essnorm": _run_essnorm,
    "rf": _run_rf,
    "schur": _run_schur,
    "covering": _run_covering,
    "localize": _run_localize,
    "rank1": _run_rank1,
    "verify-axioms": _run_verify_axioms,
}


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    _apply_threads(args.threads)
    from .config import ConfigError, load_config
    from .reporting import report_envelope, write_csv_atomic, write_json_atomic

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw["seed"] = args.seed
        if args.resolution_scale <= 0:
            raise ConfigError("resolution scale must be positive")
        claim, payload, header, rows, code = _RUNNERS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        details = getattr(exc, "details", {"error": str(exc)})
        json.dump({"command": args.command, **details}, sys.stderr, indent=2,
                  sort_keys=True, default=str)
        sys.stderr.write("\n")
        return 2
    envelope = report_envelope(args.command, claim, cfg.echo(), cfg.seed, payload)
    stem = args.command.replace("-", "_")
    json_path = os.path.join(args.out, f"{stem}.json")
    csv_path = os.path.join(args.out, f"{stem}.csv")
    write_json_atomic(json_path, envelope)
    write_csv_atomic(csv_path, header, rows)
    print(f"{args.command}: wrote {json_path} and {csv_path} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
