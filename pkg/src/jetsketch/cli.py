"""Command-line surface tying the modules into reproducible experiments.

Every command prints one machine-readable JSON object to stdout;
diagnostics go to stderr.  Exit codes: 0 success, 2 usage error, 3 domain
error (gate singularities, corrupt sketch files).
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import circuits, deletion, oracle, persistence, stability, trainers
from .errors import GateDomainError, SketchFormatError, UsageError
from .sketching import sketch, sketch_eval


def _emit(obj):
    json.dump(obj, sys.stdout, allow_nan=False)
    sys.stdout.write("\n")


def _parse_complex_vector(obj, what):
    if not isinstance(obj, list):
        raise UsageError(f"{what}: expected a JSON array")
    out = []
    for entry in obj:
        if isinstance(entry, (int, float)):
            out.append(complex(entry))
        elif (
            isinstance(entry, list)
            and len(entry) == 2
            and all(isinstance(v, (int, float)) for v in entry)
        ):
            out.append(complex(entry[0], entry[1]))
        else:
            raise UsageError(f"{what}: entries must be numbers or [re, im]")
    return np.array(out, dtype=np.complex128)


def _load_vector(path, what):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "point" in obj:
        obj = obj["point"]
    return _parse_complex_vector(obj, what)


def _parse_deletions(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as err:
        raise UsageError(f"--delete: {err}") from None


def _parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--grid must look like start:stop:step")
    try:
        start, stop, step = (float(v) for v in parts)
    except ValueError as err:
        raise UsageError(f"--grid: {err}") from None
    if step <= 0 or stop < start:
        raise UsageError("--grid needs step > 0 and stop >= start")
    count = int(round((stop - start) / step))
    values = [start + i * step for i in range(count + 1)]
    if values and values[-1] > stop + 1e-12:
        values.pop()
    return values


def _trainer_from_args(args):
    cfg = trainers.load_trainer_config(args.trainer, args.data)
    return cfg, trainers.build_trainer(cfg)


def _measurement_for(cfg_path, p, trainer_cfg=None):
    mcfg = trainers.load_measurement_config(cfg_path)
    if trainer_cfg is not None and mcfg.kind in ("loss_on_example", "logit_probe"):
        mcfg = trainers.MeasurementConfig(
            kind=mcfg.kind,
            features=mcfg.features,
            target=mcfg.target,
            index=mcfg.index,
            coordinate=mcfg.coordinate,
            model=trainer_cfg.model,
            hidden_units=trainer_cfg.hidden_units,
        )
    return trainers.build_measurement(mcfg, p)


def _cmd_precompute(args):
    _, trainer = _trainer_from_args(args)
    sk = deletion.precompute(
        trainer, args.s, args.k, seed=args.seed, workers=args.workers
    )
    persistence.save_sketch(sk, args.out)
    _emit(
        {
            "out": args.out,
            "n": sk.n,
            "p": sk.p,
            "s": sk.s,
            "k": sk.k,
            "mode": sk.directions.mode,
            "trained_parameters": [float(v) for v in sk.taylor[0, 0, :].real],
        }
    )
    return 0


def _cmd_predict(args):
    sk = persistence.load_sketch(args.sketch)
    phi = _measurement_for(args.measure, sk.p)
    dset = deletion.DeletionSet.of(_parse_deletions(args.delete), sk.n)
    nu = deletion.predict(
        sk, dset, phi, args.m, downweight=args.downweight,
        aggregator=args.aggregator,
    )
    _emit(
        {
            "prediction": nu.real,
            "imag_abs": abs(nu.imag),
            "nu": [nu.real, nu.imag],
            "deleted": list(dset.indices),
            "downweight": args.downweight,
            "m": args.m,
        }
    )
    return 0


def _cmd_params(args):
    choice = deletion.select_parameters(args.epsilon, args.delta)
    _emit(
        {
            "epsilon": choice.epsilon,
            "delta": choice.delta,
            "s": choice.s,
            "m": choice.m,
            "k": choice.k,
        }
    )
    return 0


def _cmd_sketch_fn(args):
    circuit = circuits.load_circuit(args.circuit)
    base = _load_vector(args.base, "--base")
    sk = sketch(base, circuit, args.s, args.k, seed=args.seed,
                workers=args.workers)
    persistence.save_sketch(sk, args.out)
    _emit({"out": args.out, "n": sk.n, "p": sk.p, "s": sk.s, "k": sk.k})
    return 0


def _cmd_eval(args):
    sk = persistence.load_sketch(args.sketch)
    x = _load_vector(args.point, "--point")
    nu = sketch_eval(sk, x, args.m, aggregator=args.aggregator)
    _emit(
        {
            "estimate_real": [float(v) for v in nu.real],
            "estimate_imag": [float(v) for v in nu.imag],
            "m": args.m,
        }
    )
    return 0


def _cmd_stability(args):
    cfg, trainer = _trainer_from_args(args)
    phi = _measurement_for(args.measure, trainer.num_outputs, cfg)
    composed = circuits.ComposedProgram(phi, trainer)
    profile = stability.probe(composed, args.rmax, args.trials, args.seed)
    stability.write_profile_csv(profile, args.out)
    _emit(
        {
            "out": args.out,
            "n": profile.n,
            "r_max": profile.r_max,
            "trials": profile.trials,
            "rms": [float(v) for v in profile.rms()],
        }
    )
    return 0


def _cmd_oracle(args):
    circuit = circuits.load_circuit(args.circuit)
    base = _load_vector(args.base, "--base")
    limits = oracle.OracleLimits(args.max_vars, args.max_degree)
    tt = oracle.exact_taylor_tensors(circuit, base, args.s, limits=limits)
    prof = oracle.frobenius_profile(tt)

    def _tensor_json(t):
        re = np.real(t).tolist()
        im = np.imag(t).tolist()
        return {"real": re, "imag": im, "shape": list(t.shape)}

    payload = {
        "version": 1,
        "n": tt.n,
        "p": tt.num_outputs,
        "order": tt.order,
        "complete": tt.complete,
        "frobenius_profile": [float(v) for v in prof],
        "tensors": [_tensor_json(t) for t in tt.tensors],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        _emit({"out": args.out, "order": tt.order,
               "frobenius_profile": payload["frobenius_profile"]})
    else:
        _emit(payload)
    return 0


def _measure_at(trainer, phi, w):
    theta = trainers.retrain_oracle(trainer, w)
    value = circuits.evaluate(phi, circuits.ComplexRing(), list(theta))[0]
    return complex(value)


def _cmd_retrain(args):
    cfg, trainer = _trainer_from_args(args)
    phi = _measurement_for(args.measure, trainer.num_outputs, cfg)
    dset = deletion.DeletionSet.of(
        _parse_deletions(args.delete), trainer.num_inputs
    )
    w = dset.indicator(trainer.num_inputs, weight=args.downweight)
    value = _measure_at(trainer, phi, w)
    theta = trainers.retrain_oracle(trainer, w)
    _emit(
        {
            "measurement": value.real,
            "imag_abs": abs(value.imag),
            "deleted": list(dset.indices),
            "downweight": args.downweight,
            "parameters": [float(v) for v in theta.real],
        }
    )
    return 0


def _cmd_sweep(args):
    cfg, trainer = _trainer_from_args(args)
    phi = _measurement_for(args.measure, trainer.num_outputs, cfg)
    dset = deletion.DeletionSet.of(
        _parse_deletions(args.delete), trainer.num_inputs
    )
    grid = _parse_grid(args.grid)
    sk = persistence.load_sketch(args.sketch) if args.sketch else None
    if sk is not None and sk.n != trainer.num_inputs:
        raise UsageError("sketch dimensions do not match the trainer")

    rows = []
    for z in grid:
        w = dset.indicator(trainer.num_inputs, weight=z)
        empirical = _measure_at(trainer, phi, w).real
        row = {"z": z, "empirical": empirical}
        if sk is not None:
            nu = deletion.predict(sk, dset, phi, args.m, downweight=z)
            row["predicted"] = nu.real
        rows.append(row)

    fields = ["z", "empirical"] + (["predicted"] if sk is not None else [])
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    _emit({"out": args.out, "points": len(rows),
           "deleted": list(dset.indices)})
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="jetsketch",
        description="Sketch circuits by forward-mode jets in random complex"
        " directions; predict post-deletion measurements without retraining.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def trainer_flags(p):
        p.add_argument("--trainer", required=True, help="trainer config JSON")
        p.add_argument("--data", required=True, help="dataset CSV")

    p = sub.add_parser("precompute", help="sketch a trainer at w=0")
    trainer_flags(p)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", required=True, help="64 hex chars")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_precompute)

    p = sub.add_parser("predict", help="predict a post-deletion measurement")
    p.add_argument("--sketch", required=True)
    p.add_argument("--measure", required=True, help="measurement config JSON")
    p.add_argument("--delete", required=True, help="1-based indices, comma-sep")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--downweight", type=float, default=1.0)
    p.add_argument("--aggregator", choices=("mom", "mean"), default="mom")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("params", help="derive s, m, k from epsilon, delta")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(fn=_cmd_params)

    p = sub.add_parser("sketch-fn", help="sketch an explicit circuit")
    p.add_argument("--circuit", required=True, help="circuit JSON")
    p.add_argument("--base", required=True, help="base point JSON")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_sketch_fn)

    p = sub.add_parser("eval", help="evaluate a sketch at a point")
    p.add_argument("--sketch", required=True)
    p.add_argument("--point", required=True, help="point JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--aggregator", choices=("mom", "mean"), default="mom")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("stability", help="probe Taylor-norm decay")
    trainer_flags(p)
    p.add_argument("--measure", required=True)
    p.add_argument("--rmax", type=int, required=True)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", required=True)
    p.add_argument("--out", required=True, help="profile CSV path")
    p.set_defaults(fn=_cmd_stability)

    p = sub.add_parser("oracle", help="exact derivative tensors (tiny scale)")
    p.add_argument("--circuit", required=True)
    p.add_argument("--base", required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--max-vars", type=int, default=4)
    p.add_argument("--max-degree", type=int, default=4)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("retrain", help="ground-truth measurement by retraining")
    trainer_flags(p)
    p.add_argument("--measure", required=True)
    p.add_argument("--delete", required=True)
    p.add_argument("--downweight", type=float, default=1.0)
    p.set_defaults(fn=_cmd_retrain)

    p = sub.add_parser("sweep", help="downweight sweep curve (CSV)")
    trainer_flags(p)
    p.add_argument("--measure", required=True)
    p.add_argument("--delete", required=True)
    p.add_argument("--grid", required=True, help="start:stop:step")
    p.add_argument("--out", required=True)
    p.add_argument("--sketch", default=None,
                   help="optionally add sketch predictions")
    p.add_argument("--m", type=int, default=8)
    p.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (GateDomainError, SketchFormatError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as err:
        print(f"error: malformed JSON input: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
