"""Command-line front end tying the pipeline together.

Subcommands::

    branchline gen-data  --config cfg.json --out runs/       # dataset CSV
    branchline train     --config cfg.json --data d.csv --out runs/
    branchline discover  --config cfg.json --model m.json --out runs/
    branchline simulate  --config cfg.json --geometry 2.7,9.1,1.7,0.8,1.7 --out runs/
    branchline metrics   --sweep-csv runs/sweep.csv --f0 1.0

Exit codes: 0 success, 2 configuration/input error, 3 internal numerical
failure. All outputs are deterministic for a fixed (config, seed): files
carry no timestamps and floats are written at full repr precision.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import couplers, dataset, objective, surrogate, touchstone
from .config import RunConfig, load_config
from .couplers import BandThresholds, metrics_from_tables, response_tables
from .errors import ConfigError, NumericalError, ValidationError

SWEEP_COLUMNS = ("f_ghz", "s11_db", "s21_db", "s31_db", "s41_db",
                 "ph21_deg", "ph31_deg", "phase_diff_deg")

MAE_ROWS = ("|S11| (dB)", "|S21| (dB)", "|S31| (dB)", "|S41| (dB)",
            "Phase S21 (deg)", "Phase S31 (deg)")


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _out_dir(args, cfg: RunConfig | None) -> Path:
    out = args.out or (cfg.out_dir if cfg else None) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_run_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("this command needs --config <file>")
    cfg = load_config(args.config)
    if args.seed is not None:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        raw["seed"] = args.seed
        from .config import parse_config

        cfg = parse_config(raw)
    return cfg


def cmd_gen_data(args) -> int:
    cfg = _load_run_config(args)
    if cfg.dataset is None:
        raise ConfigError(f"topology {cfg.topology!r} has no dataset protocol")
    ds = dataset.generate(
        cfg.topology, cfg.substrate, cfg.dataset.n_samples, cfg.dataset.f_band_ghz, cfg.seed
    )
    out = _out_dir(args, cfg) / "dataset.csv"
    dataset.save(ds, out)
    _say(args, f"wrote {len(ds.records)} records to {out} ({ds.resample_count} resamples)")
    return 0


def cmd_train(args) -> int:
    cfg = _load_run_config(args)
    if cfg.train is None or cfg.dataset is None:
        raise ConfigError(f"topology {cfg.topology!r} has no training protocol")
    if not args.data:
        raise ConfigError("train needs --data <dataset.csv>")
    ds = dataset.load(args.data)
    if ds.kind != cfg.topology:
        raise ConfigError(
            f"dataset is for topology {ds.kind!r}, config says {cfg.topology!r}"
        )
    train_set, test_set = dataset.split(ds, cfg.dataset.test_fraction, cfg.seed)
    model, report = surrogate.train(train_set, test_set, cfg.train)
    out = _out_dir(args, cfg)
    surrogate.save_model(model, out / "model.json")
    mae = report.final_mae
    (out / "mae_report.json").write_text(
        json.dumps({"columns": list(dataset.OUTPUT_COLUMNS), "mae": mae.tolist()}, indent=1)
        + "\n",
        encoding="utf-8",
    )
    _say(args, f"trained on {len(train_set.records)} records, "
               f"tested on {len(test_set.records)}; model at {out / 'model.json'}")
    _say(args, f"{'Electrical Property':<22}MAE in Test Dataset")
    for name, value in zip(MAE_ROWS, mae):
        _say(args, f"{name:<22}{value:.3f}")
    return 0


def cmd_discover(args) -> int:
    cfg = _load_run_config(args)
    if cfg.spec is None or cfg.sade is None:
        raise ConfigError(f"topology {cfg.topology!r} has no discovery protocol")
    if not args.model:
        raise ConfigError("discover needs --model <model.json>")
    model = surrogate.load_model(args.model)
    sade_cfg = cfg.sade
    outcome = objective.discover(
        cfg.spec, cfg.topology, model, sade_cfg, cfg.substrate, cfg.sweep
    )
    out = _out_dir(args, cfg)
    vector = couplers.geometry_to_vector(outcome.geometry)
    m = outcome.report.metrics
    doc = {
        "topology": cfg.topology,
        "spec": {
            "f0_ghz": cfg.spec.f0_ghz,
            "coupling_db": cfg.spec.coupling_target_db,
            "phase_deg": cfg.spec.phase_target_deg,
        },
        "columns": list(couplers.VECTOR_ORDER[cfg.topology]),
        "x_star_mm": vector.tolist(),
        "objective": outcome.result.f_star,
        "achieved": {
            "coupling_db": m.coupling_db,
            "phase_diff_deg": m.phase_diff_deg,
            "isolation_db": m.isolation_db,
            "return_loss_db": m.return_loss_db,
            "fbw_pct": m.fbw_pct,
            "k0_db": m.k0_db,
        },
        "met": {
            "coupling": outcome.report.met_coupling,
            "phase": outcome.report.met_phase,
            "isolation": outcome.report.met_isolation,
            "return_loss": outcome.report.met_return_loss,
        },
    }
    (out / "discovery.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    names = couplers.VECTOR_ORDER[cfg.topology]
    _say(args, "recommended physical parameters (mm): "
               + "  ".join(f"{n}={v:.4g}" for n, v in zip(names, vector)))
    _say(args, f"achieved: coupling {m.coupling_db:.3f} dB, phase diff {m.phase_diff_deg:.2f} deg, "
               f"isolation {m.isolation_db:.1f} dB, return loss {m.return_loss_db:.1f} dB, "
               f"FBW {m.fbw_pct:.2f} %, k0 {m.k0_db:.3f} dB")
    _say(args, f"report written to {out / 'discovery.json'}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_run_config(args)
    if not args.geometry:
        raise ConfigError("simulate needs --geometry v1,v2,... in canonical order")
    try:
        vector = [float(tok) for tok in args.geometry.split(",")]
    except ValueError as err:
        raise ConfigError(f"bad --geometry value: {err}") from err
    geometry = couplers.vector_to_geometry(cfg.topology, vector)
    resp = couplers.simulate(geometry, cfg.substrate, cfg.sweep)
    tables = response_tables(resp)
    tables["phase_diff_deg"] = np.array(
        [couplers.wrap_deg(a - b) for a, b in zip(tables["ph21_deg"], tables["ph31_deg"])]
    )
    out = _out_dir(args, cfg)
    sweep_path = out / "sweep.csv"
    lines = [",".join(SWEEP_COLUMNS)]
    for i in range(cfg.sweep.n_points):
        lines.append(",".join(repr(float(tables[c][i])) for c in SWEEP_COLUMNS))
    sweep_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _say(args, f"wrote {cfg.sweep.n_points} sweep rows to {sweep_path}")
    if args.touchstone:
        s11, s21, s31, s41 = resp.s_arrays()
        ts_path = out / "response.s4p"
        touchstone.write_s4p(ts_path, cfg.sweep.frequencies(), s11, s21, s31, s41)
        _say(args, f"wrote Touchstone data to {ts_path}")
    return 0


def cmd_metrics(args) -> int:
    if not args.sweep_csv:
        raise ConfigError("metrics needs --sweep-csv <file>")
    if args.f0 is None:
        raise ConfigError("metrics needs --f0 <GHz>")
    lines = Path(args.sweep_csv).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValidationError(f"{args.sweep_csv}: empty file")
    header = lines[0].split(",")
    needed = [c for c in SWEEP_COLUMNS if c != "phase_diff_deg"]
    for col in needed:
        if col not in header:
            raise ValidationError(f"{args.sweep_csv}: line 1: missing column {col!r}")
    idx = {c: header.index(c) for c in needed}
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            rows.append([float(parts[idx[c]]) for c in needed])
        except (ValueError, IndexError) as err:
            raise ValidationError(f"{args.sweep_csv}: line {lineno}: {err}") from err
    if not rows:
        raise ValidationError(f"{args.sweep_csv}: no data rows")
    cols = np.array(rows).T
    thresholds = BandThresholds(rl_db=args.rl_db, iso_db=args.iso_db,
                                imbalance_db=args.imbalance_db)
    m = metrics_from_tables(cols[0], cols[1], cols[2], cols[3], cols[4],
                            cols[5], cols[6], args.f0, thresholds)
    print(
        f"coupling_db={m.coupling_db!r} phase_diff_deg={m.phase_diff_deg!r} "
        f"isolation_db={m.isolation_db!r} return_loss_db={m.return_loss_db!r} "
        f"fbw_pct={m.fbw_pct!r} k0_db={m.k0_db!r}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchline",
        description="Design automation for microwave branch-line couplers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="run configuration JSON file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = sub.add_parser("gen-data", help="sample the design space into a dataset CSV")
    common(p)
    p.set_defaults(fn=cmd_gen_data)

    p = sub.add_parser("train", help="train the surrogate on a dataset")
    common(p)
    p.add_argument("--data", help="dataset CSV from gen-data")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("discover", help="search for a design meeting the spec")
    common(p)
    p.add_argument("--model", help="trained model JSON")
    p.set_defaults(fn=cmd_discover)

    p = sub.add_parser("simulate", help="sweep a geometry with the truth model")
    common(p)
    p.add_argument("--geometry", help="comma-separated design vector in canonical order")
    p.add_argument("--touchstone", action="store_true", help="also write a .s4p file")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("metrics", help="scalar metrics of a sweep CSV")
    common(p)
    p.add_argument("--sweep-csv", dest="sweep_csv", help="CSV produced by simulate")
    p.add_argument("--f0", type=float, help="center frequency in GHz")
    p.add_argument("--rl-db", dest="rl_db", type=float, default=20.0)
    p.add_argument("--iso-db", dest="iso_db", type=float, default=20.0)
    p.add_argument("--imbalance-db", dest="imbalance_db", type=float, default=0.86)
    p.set_defaults(fn=cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
