"""Experiment configuration: one JSON document, validated before any compute.

Symbols are declared once under "symbols" and referenced by name from the
operator block and the CLI commands; every reference is resolved during
validation so misconfigurations fail before assembly starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .operators import MatrixSymbol, ball_indicator_symbol, constant_symbol, poly_symbol
from .spaces import SpaceSpec, space_from_dict, space_to_dict


class ConfigError(ValueError):
    """Configuration/precondition failure with a JSON-serializable payload."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = {"error": message, **details}


def _parse_scalar_point(data) -> complex:
    if isinstance(data, dict):
        try:
            return complex(float(data.get("re", 0.0)), float(data.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad point {data!r}") from exc
    if isinstance(data, (list, tuple)) and len(data) == 2:
        return complex(float(data[0]), float(data[1]))
    if isinstance(data, (int, float)):
        return complex(data)
    raise ConfigError(f"bad point {data!r}")


def parse_point(space: SpaceSpec, data):
    """Point from config: {re, im}, [re, im], plain real, or a 2-list for the bidisc."""
    if space.nfactors == 2:
        if not (isinstance(data, (list, tuple)) and len(data) == 2):
            raise ConfigError(f"bidisc point needs two entries, got {data!r}")
        return np.array([_parse_scalar_point(data[0]), _parse_scalar_point(data[1])])
    return _parse_scalar_point(data)


def _parse_matrix(space: SpaceSpec, data) -> np.ndarray:
    arr = np.array([[_parse_scalar_point(e) for e in row] for row in data], dtype=complex)
    if arr.shape != (space.d, space.d):
        raise ConfigError(f"matrix must be {space.d}x{space.d}, got {arr.shape}")
    return arr


def parse_symbol(space: SpaceSpec, name: str, spec: dict) -> MatrixSymbol:
    kind = spec.get("type")
    if kind == "poly":
        entries: Dict = {}
        for item in spec.get("entries", []):
            i, k = int(item["i"]), int(item["k"])
            if not (0 <= i < space.d and 0 <= k < space.d):
                raise ConfigError(f"symbol {name!r}: entry ({i},{k}) outside d={space.d}")
            terms = {}
            for t in item.get("terms", []):
                if space.nfactors == 2:
                    powers = (int(t["a1"]), int(t["b1"]), int(t["a2"]), int(t["b2"]))
                else:
                    powers = (int(t["a"]), int(t["b"]))
                if any(p < 0 for p in powers):
                    raise ConfigError(f"symbol {name!r}: negative power {powers}")
                terms[powers] = _parse_scalar_point(t["c"])
            entries[(i, k)] = terms
        return poly_symbol(space, entries, label=name)
    if kind == "ball":
        if space.nfactors != 1:
            raise ConfigError(f"symbol {name!r}: ball symbols are single-factor")
        return ball_indicator_symbol(
            space, _parse_scalar_point(spec["center"]), float(spec["radius"]),
            _parse_matrix(space, spec["matrix"]),
            ball_metric=spec.get("metric", "euclidean"), label=name)
    if kind == "const":
        return constant_symbol(space, _parse_matrix(space, spec["matrix"]), label=name)
    raise ConfigError(f"symbol {name!r}: unknown type {kind!r}")


_KNOWN_KEYS = {
    "space", "n_modes", "radial_order", "angular_order", "symbols", "operator",
    "z_grid", "radii", "angles", "shells", "p", "berezin_threshold",
    "essnorm_threshold", "covering_r", "rf", "rank1", "schur_kernel_file",
    "seed", "kernel_points", "n_random_probes",
}

_DEFAULT_RAW = {
    "space": {"kind": "bergman_disc", "alpha": 0.0, "d": 2},
    "n_modes": 24,
}


@dataclass
class ExperimentConfig:
    space: SpaceSpec
    n_modes: int = 24
    radial_order: Optional[int] = None
    angular_order: Optional[int] = None
    symbol_specs: Dict[str, dict] = field(default_factory=dict)
    operator: Optional[dict] = None
    z_grid: Optional[list] = None
    radii: Optional[List[float]] = None
    angles: Optional[List[float]] = None
    shells: Optional[List[float]] = None
    p: float = 4.0
    berezin_threshold: float = 0.05
    essnorm_threshold: float = 0.25
    covering_r: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    rf: dict = field(default_factory=lambda: {"r": 3.0, "s": 3.0})
    rank1: dict = field(default_factory=lambda: {"n_pairs": 50, "degree": 4})
    schur_kernel_file: Optional[str] = None
    seed: int = 0
    kernel_points: Optional[list] = None
    n_random_probes: int = 8
    raw: dict = field(default_factory=dict)

    def symbol(self, name: str) -> MatrixSymbol:
        if name not in self.symbol_specs:
            raise ConfigError(f"symbol {name!r} not defined",
                              defined=sorted(self.symbol_specs))
        return parse_symbol(self.space, name, self.symbol_specs[name])

    def points(self, data) -> list:
        return [parse_point(self.space, entry) for entry in data]

    def echo(self) -> dict:
        payload = dict(self.raw)
        payload["space"] = space_to_dict(self.space)
        return payload


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {**_DEFAULT_RAW, **raw}
    try:
        space = space_from_dict(dict(merged["space"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad space block: {exc}") from exc
    n_modes = int(merged.get("n_modes", 24))
    if n_modes < 1:
        raise ConfigError("n_modes must be >= 1")
    cfg = ExperimentConfig(
        space=space,
        n_modes=n_modes,
        radial_order=merged.get("radial_order"),
        angular_order=merged.get("angular_order"),
        symbol_specs=dict(merged.get("symbols", {})),
        operator=merged.get("operator"),
        z_grid=merged.get("z_grid"),
        radii=merged.get("radii"),
        angles=merged.get("angles"),
        shells=merged.get("shells"),
        p=float(merged.get("p", 4.0)),
        berezin_threshold=float(merged.get("berezin_threshold", 0.05)),
        essnorm_threshold=float(merged.get("essnorm_threshold", 0.25)),
        covering_r=[float(x) for x in merged.get("covering_r", [0.5, 1.0, 2.0, 4.0])],
        rf=dict(merged.get("rf", {"r": 3.0, "s": 3.0})),
        rank1=dict(merged.get("rank1", {"n_pairs": 50, "degree": 4})),
        schur_kernel_file=merged.get("schur_kernel_file"),
        seed=int(merged.get("seed", 0)),
        kernel_points=merged.get("kernel_points"),
        n_random_probes=int(merged.get("n_random_probes", 8)),
        raw=merged,
    )
    if cfg.p <= 1.0:
        raise ConfigError("p must exceed 1")
    # resolve every declared symbol and the operator references up front
    for name in cfg.symbol_specs:
        cfg.symbol(name)
    if cfg.operator is not None:
        _validate_operator_block(cfg)
    return cfg


def _validate_operator_block(cfg: ExperimentConfig) -> None:
    block = cfg.operator
    kind = block.get("type")
    if kind == "identity":
        return
    if kind == "toeplitz":
        cfg.symbol(block.get("symbol", ""))
        return
    if kind == "toeplitz_product":
        names = block.get("symbols", [])
        if not names:
            raise ConfigError("toeplitz_product needs a nonempty symbol list")
        for name in names:
            cfg.symbol(name)
        return
    raise ConfigError(f"unknown operator type {kind!r}")


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return config_from_dict(dict(_DEFAULT_RAW))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", path=str(path)) from exc
    return config_from_dict(raw)
