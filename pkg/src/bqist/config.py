"""Run configuration and tolerance registry for the command-line pipeline."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

#: documented tolerance names; each may be overridden by the environment
#: variable BQIST_TOL_<NAME> (upper case)
TOLERANCES = {
    "circle_relation": 1e-6,     # acceptance residual for the circle identity
    "conjugate_relation": 1e-6,  # r2 vs rtilde * conj(r1(1/kbar))
    "mass_condition": 1e-9,      # |int u1 dx|
    "tail": 1e-9,                # compact-support tails at +-L
    "r1_segment": 5e-3,          # heuristic no-high-frequency threshold
    "zero_residual": 1e-8,       # |s11| at an accepted zero
    "nu_hat_floor": -1e-10,      # admissible negativity of nu-hat
}


def get_tol(name: str) -> float:
    if name not in TOLERANCES:
        raise KeyError(f"unknown tolerance {name!r}")
    env = os.environ.get(f"BQIST_TOL_{name.upper()}")
    return float(env) if env is not None else TOLERANCES[name]


class ConfigError(ValueError):
    """Invalid or incomplete run configuration (exit code 2)."""


@dataclass
class RunConfig:
    initial_data: dict
    out_dir: Path
    n_per_arc: int = 56
    zeta_window: tuple = (0.62, 0.95)
    n_zeta: int = 60
    t_values: tuple = (60.0, 120.0, 240.0)
    solitons: dict = field(default_factory=lambda: {"mode": "none"})
    pde: dict = field(default_factory=dict)
    jobs: int = 1
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path, out_dir=None) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if "initial_data" not in raw:
            raise ConfigError("config missing required field 'initial_data'")
        idata = raw["initial_data"]
        if "csv" in idata:
            csv_path = Path(idata["csv"])
            if not csv_path.is_absolute():
                csv_path = path.parent / csv_path
            if not csv_path.exists():
                raise ConfigError(f"initial_data.csv file not found: {csv_path}")
            idata = dict(idata, csv=str(csv_path))
        elif "form" not in idata:
            raise ConfigError("initial_data needs either 'form' or 'csv'")
        window = tuple(raw.get("zeta_window", cls.zeta_window))
        lo_edge = 1.0 / 3.0**0.5
        if not (lo_edge < window[0] < window[1] < 1.0):
            raise ConfigError(f"zeta_window must lie inside (1/sqrt(3), 1): {window}")
        t_values = tuple(float(t) for t in raw.get("t_values", cls.t_values))
        if any(t < 2 for t in t_values):
            raise ConfigError("t_values must all be >= 2")
        sol = raw.get("solitons", {"mode": "none"})
        if sol.get("mode") not in ("none", "detect", "explicit"):
            raise ConfigError("solitons.mode must be none|detect|explicit")
        n_per_arc = int(raw.get("n_per_arc", cls.n_per_arc))
        if n_per_arc < 8:
            raise ConfigError("n_per_arc must be at least 8")
        tols = raw.get("tolerances", {})
        for name, val in tols.items():
            if name not in TOLERANCES:
                raise ConfigError(f"unknown tolerance override {name!r}")
            if float(val) <= 0 and name != "nu_hat_floor":
                raise ConfigError(f"tolerance {name!r} must be positive")
            os.environ[f"BQIST_TOL_{name.upper()}"] = str(float(val))
        out = Path(out_dir) if out_dir else Path(raw.get("out_dir", "bqist_out"))
        return cls(initial_data=idata, out_dir=out, n_per_arc=n_per_arc,
                   zeta_window=window, n_zeta=int(raw.get("n_zeta", cls.n_zeta)),
                   t_values=t_values, solitons=sol, pde=raw.get("pde", {}),
                   jobs=int(raw.get("jobs", 1)), tolerances=tols)

    def build_initial_data(self):
        from . import scattering as sc

        idata = self.initial_data
        if "csv" in idata:
            return sc.load_csv(idata["csv"])
        form = idata["form"]
        if form not in sc.NAMED_FORMS:
            raise ConfigError(f"unknown initial-data form {form!r}; "
                              f"choose from {sorted(sc.NAMED_FORMS)} or give csv")
        kwargs = {k: v for k, v in idata.items() if k != "form"}
        try:
            return sc.NAMED_FORMS[form](**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for form {form!r}: {exc}") from exc
