"""Run configuration: one JSON file with a section per subsystem.

Unknown keys anywhere are hard errors, so a typo in a weight name fails
fast instead of silently running with defaults. Every topology ships with
complete defaults (substrate, sweep, dataset protocol, training budget,
design spec, search budget), so a minimal config is just::

    {"topology": "folded"}

and any subset of fields can be overridden per section.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .couplers import FrequencySweep
from .errors import ConfigError
from .microstrip import Substrate
from .objective import DesignSpec
from .sade import SadeConfig
from .surrogate import TrainConfig

TOPOLOGY_DEFAULTS = {
    "folded": {
        "substrate": {"eps_r": 2.2, "tan_d": 0.0009, "h_mm": 0.508},
        "sweep": {"f_start_ghz": 0.5, "f_stop_ghz": 2.0, "n_points": 201},
        "dataset": {"n_samples": 600, "f_band_ghz": [0.8, 1.7], "test_fraction": 1.0 / 6.0},
        "train": {"epochs": 500},
        "spec": {"f0_ghz": 1.0, "coupling_db": 3.0, "band_check_ghz": []},
        "sade": {"pop_size": 100, "generations": 200},
    },
    "cascaded": {
        "substrate": {"eps_r": 2.2, "tan_d": 0.0009, "h_mm": 1.575},
        "sweep": {"f_start_ghz": 1.0, "f_stop_ghz": 3.5, "n_points": 201},
        "dataset": {"n_samples": 3300, "f_band_ghz": [1.4, 3.2], "test_fraction": 1.0 / 11.0},
        "train": {"epochs": 1000},
        "spec": {"f0_ghz": 2.0, "coupling_db": 3.0, "band_check_ghz": [-0.3, 0.3]},
        "sade": {"pop_size": 100, "generations": 200},
    },
    "classical": {
        "substrate": {"eps_r": 2.2, "tan_d": 0.0009, "h_mm": 0.508},
        "sweep": {"f_start_ghz": 0.5, "f_stop_ghz": 1.5, "n_points": 201},
        "dataset": None,
        "train": None,
        "spec": None,
        "sade": None,
    },
}


@dataclass(frozen=True)
class DatasetConfig:
    n_samples: int
    f_band_ghz: tuple[float, float]
    test_fraction: float


@dataclass(frozen=True)
class RunConfig:
    topology: str
    seed: int
    substrate: Substrate
    sweep: FrequencySweep
    dataset: DatasetConfig | None
    train: TrainConfig | None
    spec: DesignSpec | None
    sade: SadeConfig | None
    out_dir: str | None = None


def _section(raw: dict, name: str, allowed: set[str]) -> dict:
    value = raw.get(name, {})
    if value is None:
        value = {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be an object")
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in section {name!r}: {', '.join(sorted(unknown))}"
        )
    return value


def _merged(defaults: dict | None, overrides: dict) -> dict:
    out = dict(defaults or {})
    out.update(overrides)
    return out


def parse_config(raw: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed JSON object."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be an object")
    top_allowed = {"topology", "seed", "out_dir", "substrate", "sweep",
                   "dataset", "train", "spec", "sade"}
    unknown = set(raw) - top_allowed
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    topology = raw.get("topology")
    if topology not in TOPOLOGY_DEFAULTS:
        raise ConfigError(
            f"topology must be one of {sorted(TOPOLOGY_DEFAULTS)}, got {topology!r}"
        )
    defaults = TOPOLOGY_DEFAULTS[topology]
    seed = int(raw.get("seed", 7))
    out_dir = raw.get("out_dir")

    sub_raw = _merged(defaults["substrate"], _section(raw, "substrate", {"eps_r", "tan_d", "h_mm"}))
    substrate = Substrate(eps_r=float(sub_raw["eps_r"]), tan_d=float(sub_raw["tan_d"]),
                          h_mm=float(sub_raw["h_mm"]))

    sweep_raw = _merged(defaults["sweep"],
                        _section(raw, "sweep", {"f_start_ghz", "f_stop_ghz", "n_points"}))
    sweep = FrequencySweep(float(sweep_raw["f_start_ghz"]), float(sweep_raw["f_stop_ghz"]),
                           int(sweep_raw["n_points"]))

    dataset_cfg = None
    ds_over = _section(raw, "dataset", {"n_samples", "f_band_ghz", "test_fraction"})
    if defaults["dataset"] is not None or ds_over:
        if defaults["dataset"] is None:
            raise ConfigError(f"topology {topology!r} does not support dataset generation")
        ds_raw = _merged(defaults["dataset"], ds_over)
        band = ds_raw["f_band_ghz"]
        if not (isinstance(band, (list, tuple)) and len(band) == 2):
            raise ConfigError("dataset.f_band_ghz must be [lo, hi]")
        dataset_cfg = DatasetConfig(
            n_samples=int(ds_raw["n_samples"]),
            f_band_ghz=(float(band[0]), float(band[1])),
            test_fraction=float(ds_raw["test_fraction"]),
        )

    train_cfg = None
    tr_over = _section(raw, "train", {"epochs", "batch_size", "learning_rate",
                                      "final_learning_rate", "seed", "hidden_sizes",
                                      "activation", "weight_decay"})
    if defaults["train"] is not None or tr_over:
        if defaults["train"] is None:
            raise ConfigError(f"topology {topology!r} does not support training")
        tr_raw = _merged(defaults["train"], tr_over)
        tr_raw.setdefault("seed", seed)
        if "hidden_sizes" in tr_raw:
            tr_raw["hidden_sizes"] = tuple(int(v) for v in tr_raw["hidden_sizes"])
        train_cfg = TrainConfig(**tr_raw)

    spec_cfg = None
    sp_over = _section(raw, "spec", {"f0_ghz", "coupling_db", "phase_deg",
                                     "iso_threshold_db", "rl_threshold_db",
                                     "alpha", "beta", "gamma", "lambda",
                                     "band_check_ghz", "band_coupling_weight",
                                     "hinge_margin_db"})
    if defaults["spec"] is not None or sp_over:
        if defaults["spec"] is None:
            raise ConfigError(f"topology {topology!r} does not support discovery specs")
        sp_raw = _merged(defaults["spec"], sp_over)
        spec_cfg = DesignSpec(
            f0_ghz=float(sp_raw["f0_ghz"]),
            coupling_target_db=float(sp_raw["coupling_db"]),
            phase_target_deg=float(sp_raw.get("phase_deg", 90.0)),
            iso_threshold_db=float(sp_raw.get("iso_threshold_db", -20.0)),
            rl_threshold_db=float(sp_raw.get("rl_threshold_db", -20.0)),
            alpha=float(sp_raw.get("alpha", 1.0)),
            beta=float(sp_raw.get("beta", 0.2)),
            gamma=float(sp_raw.get("gamma", 1.0)),
            lam=float(sp_raw.get("lambda", 1.0)),
            band_check_ghz=tuple(float(v) for v in sp_raw.get("band_check_ghz", [])),
            band_coupling_weight=float(sp_raw.get("band_coupling_weight", 0.5)),
            hinge_margin_db=float(sp_raw.get("hinge_margin_db", 5.0)),
        )

    sade_cfg = None
    sa_over = _section(raw, "sade", {"pop_size", "generations", "learning_period",
                                     "crm_init", "f_mean", "f_dev", "cr_dev",
                                     "cr_refresh", "seed"})
    if defaults["sade"] is not None or sa_over:
        if defaults["sade"] is None:
            raise ConfigError(f"topology {topology!r} does not support discovery runs")
        sa_raw = _merged(defaults["sade"], sa_over)
        sa_raw.setdefault("seed", seed)
        sa_raw = {k: (int(v) if k in ("pop_size", "generations", "learning_period",
                                      "cr_refresh", "seed") else float(v))
                  for k, v in sa_raw.items()}
        sade_cfg = SadeConfig(**sa_raw)

    return RunConfig(
        topology=topology,
        seed=seed,
        substrate=substrate,
        sweep=sweep,
        dataset=dataset_cfg,
        train=train_cfg,
        spec=spec_cfg,
        sade=sade_cfg,
        out_dir=out_dir,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON: {err}") from err
    return parse_config(raw)
