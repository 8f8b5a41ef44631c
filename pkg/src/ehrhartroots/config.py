from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import yaml

JOBS_ENV_VAR = "EHRHART_ROOTS_JOBS"
OUTPUT_FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class Tolerances:
    step: float = 1e-13          # Aberth stopping step
    residual: float = 1e-9       # accepted scaled residual |p(z)| / sum |c_i| |z|^i
    classify: float = 1e-7       # real / critical-line / interval / band
    distinct: float = 1e-6       # pairwise root separation
    bisection: float = 1e-12     # critical-line bisection interval width
    conjugate: float = 1e-9      # conjugate pairing of nonreal roots


@dataclass(frozen=True)
class Limits:
    max_d_numeric: int = 30
    max_d_exact: int = 20
    max_vertices: int = 64
    max_ambient_dim: int = 8
    max_interior_d: int = 8
    max_graph_vertices: int = 7
    max_iterations: int = 500


@dataclass(frozen=True)
class RunConfig:
    tolerances: Tolerances = field(default_factory=Tolerances)
    limits: Limits = field(default_factory=Limits)
    output_format: str = "json"
    jobs: int = 0  # 0 = auto
    seed: int = 0
    verify: bool = False

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        tol_raw = d.get("tolerances") or {}
        lim_raw = d.get("limits") or {}

        def _section(cls, raw: dict, name: str, convert, check, requirement: str):
            known = {f.name for f in fields(cls)}
            values = {}
            for key, raw_value in raw.items():
                if key not in known:
                    raise ValueError(f"Unknown key {name}.{key} in config")
                # YAML 1.1 reads "1e-13" as a string
                try:
                    value = convert(raw_value)
                except (TypeError, ValueError):
                    raise ValueError(f"{name}.{key} must be {requirement}, got {raw_value!r}")
                if not check(value):
                    raise ValueError(f"{name}.{key} must be {requirement}, got {raw_value!r}")
                values[key] = value
            return cls(**values)

        tolerances = _section(Tolerances, tol_raw, "tolerances", float, lambda v: v > 0, "> 0")
        limits = _section(Limits, lim_raw, "limits", int, lambda v: v >= 1, "an integer >= 1")

        output_format = str(d.get("output_format", "json")).lower()
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}, got {output_format!r}")

        jobs = int(d.get("jobs", 0))
        if jobs < 0:
            raise ValueError(f"jobs must be >= 0, got {jobs}")

        return RunConfig(
            tolerances=tolerances,
            limits=limits,
            output_format=output_format,
            jobs=jobs,
            seed=int(d.get("seed", 0)),
            verify=bool(d.get("verify", False)),
        )


def load_config(path: Optional[str] = None) -> RunConfig:
    """
    Load config.yaml. An explicit path must exist; without one, config.yaml in the
    current working directory is used when present, else the built-in defaults.
    EHRHART_ROOTS_JOBS overrides the configured jobs.
    """
    if path is None:
        candidate = os.path.join(os.getcwd(), "config.yaml")
        data = {}
        if os.path.isfile(candidate):
            with open(candidate, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
    else:
        if not os.path.isfile(path):
            raise FileNotFoundError(f"Config file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}

    cfg = RunConfig.from_dict(data)
    env_jobs = os.environ.get(JOBS_ENV_VAR)
    if env_jobs:
        try:
            jobs = int(env_jobs)
        except ValueError:
            raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {env_jobs!r}")
        if jobs < 0:
            raise ValueError(f"{JOBS_ENV_VAR} must be >= 0, got {jobs}")
        cfg = replace(cfg, jobs=jobs)
    return cfg
