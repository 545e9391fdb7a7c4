"""Command-line interface: ``nhqc {gate,holonomy,qpt,sweep,report}``.

Exit codes: 0 success, 1 a numerical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .channel import Channel
from .gates import GateSpec, build_h1, build_h2, build_h3, induced_channel, parse_angle, realize_gate
from .holonomy import Subspace, holonomy_check
from .propagator import TAU1, TAU2, TAU3, product_error
from .tomography import (
    attenuate,
    chi_fid_attenuated,
    chi_fid_unattenuated,
    chi_of_unitary,
    evaluate_gate,
    qpt_chi,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SIG_DIGITS = 12
REPORT_TOL = 0.003

# theoretical chi fidelities at N1=3, N2=2, N3=2
TARGET_TABLE = (
    ("rz:theta=pi/2:mode=trotter:n=3", 0.992),
    ("rz:theta=pi:mode=trotter:n=3", 0.986),
    ("rx:phi=pi/2:mode=trotter:n=2", 0.992),
    ("rx:phi=pi:mode=trotter:n=2", 0.974),
    ("cnot:mode=trotter:n=2", 0.987),
)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    target: str | None = None
    inputs: str = "paper"
    leakage: str = "trace"
    lam: float = 1.0
    n: tuple | None = None
    angle: str | None = None
    j: float = 1.0
    tau: float | None = None
    subspace: str | None = None
    grid: int = 101
    tol: float = 1e-9
    seed: int = 0
    fmt: str = "json"
    out: str | None = None
    unitary: bool = False

    def to_argv(self) -> list[str]:
        """Canonical argument list; ``parse_config(cfg.to_argv()) == cfg``."""
        argv = [self.command]
        if self.target is not None:
            argv.append(self.target)
        defaults = _subcommand_defaults(self.command)
        for name, flag in _FLAGS.items():
            value = getattr(self, name)
            if value == defaults.get(name, getattr(RunConfig, name)):
                continue
            if name == "unitary":
                argv.append("--unitary")
            elif name == "n":
                argv.append(f"--n={','.join(str(v) for v in value)}")
            else:
                argv.append(f"{flag}={value}")
        return argv

    def to_text(self) -> str:
        return " ".join(self.to_argv())


_FLAGS = {
    "inputs": "--inputs",
    "leakage": "--leakage",
    "lam": "--lambda",
    "n": "--n",
    "angle": "--angle",
    "j": "--j",
    "tau": "--tau",
    "subspace": "--subspace",
    "grid": "--grid",
    "tol": "--tol",
    "seed": "--seed",
    "fmt": "--format",
    "out": "--out",
    "unitary": "--unitary",
}


def _int_list(text: str) -> tuple:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("step counts must be positive")
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nhqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, formats=("json",)):
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--format", dest="fmt", choices=formats, default="json")

    p = sub.add_parser("gate", help="realize a gate and score it on the tomography inputs")
    p.add_argument("target", metavar="SPEC", help="e.g. rz:theta=pi/2:mode=trotter:n=3")
    p.add_argument("--inputs", choices=("paper", "full"), default="paper")
    p.add_argument("--leakage", choices=("trace", "project"), default="trace")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--unitary", action="store_true", help="include the register unitary")
    common(p, formats=("json", "csv"))

    p = sub.add_parser("holonomy", help="check the holonomy conditions for h1, h2 or h3")
    p.add_argument("target", choices=("h1", "h2", "h3"))
    p.add_argument("--phi", "--angle", dest="angle", default=None, help="phase for h1/h2 (default 0)")
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--subspace", default=None, help="comma-separated basis labels, e.g. 10,11")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)

    p = sub.add_parser("qpt", help="process tomography chi matrix of a gate (or 'random')")
    p.add_argument("target", metavar="SPEC")
    p.add_argument("--inputs", choices=("paper", "full"), default="full")
    p.add_argument("--leakage", choices=("trace", "project"), default="trace")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("sweep", help="Trotter error and chi fidelity against step count")
    p.add_argument("target", choices=("rz", "rx", "cnot"))
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--theta", "--phi", "--angle", dest="angle", default=None)
    p.add_argument("--leakage", choices=("trace", "project"), default="trace")
    common(p, formats=("csv", "json"))
    p.set_defaults(fmt="csv")

    p = sub.add_parser("report", help="reproduce the theoretical chi-fidelity table")
    common(p, formats=("json", "csv"))
    return parser


def _subcommand_defaults(command: str) -> dict:
    sub = next(a for a in build_parser()._actions if isinstance(a, argparse._SubParsersAction))
    parser = sub.choices[command]
    defaults = {a.dest: a.default for a in parser._actions}
    defaults.update(parser._defaults)
    return defaults


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    if not 0 < cfg.lam <= 1:
        raise UsageError(f"--lambda must lie in (0, 1], got {cfg.lam}")
    return cfg


# --- serialization ------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _clean(v) for k, v in row.items()})
    return buf.getvalue()


def _doc(cfg: RunConfig, results, passed: bool) -> dict:
    config = asdict(cfg)
    config["text"] = cfg.to_text()
    return {"command": cfg.command, "config": config, "results": results, "pass": passed}


# --- commands -----------------------------------------------------------------


def _gate_spec(text: str) -> GateSpec:
    try:
        return GateSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gate(cfg: RunConfig):
    spec = _gate_spec(cfg.target)
    g = realize_gate(spec)
    ch = induced_channel(g, cfg.leakage)
    rep = evaluate_gate(ch, g.ideal_logical, inputs=cfg.inputs, lam=cfg.lam)
    tp_err = ch.trace_preservation_error()
    checks = {"chi_fit_residual": rep.chi.residual}
    if cfg.leakage == "trace":
        checks["trace_preservation_error"] = tp_err
    passed = all(v < 1e-8 for v in checks.values())
    per_input = [
        {
            "input": label,
            "output": out,
            "ideal": th,
            "state_fidelity_attenuated": fa,
            "state_fidelity_unattenuated": fu,
        }
        for label, out, th, fa, fu in zip(
            rep.labels, rep.outputs, rep.ideal_outputs, rep.state_attenuated, rep.state_unattenuated
        )
    ]
    results = {
        "gate": str(spec),
        "logical_action": g.logical_block(),
        "ideal_logical": g.ideal_logical,
        "leakage": g.leakage,
        "inputs": per_input,
        "mean_state_fidelity_attenuated": rep.mean_state_attenuated,
        "mean_state_fidelity_unattenuated": rep.mean_state_unattenuated,
        "chi_fidelity_attenuated": rep.chi_attenuated,
        "chi_fidelity_unattenuated": rep.chi_unattenuated,
        "checks": checks,
    }
    if cfg.unitary:
        results["register_unitary"] = g.register_unitary
    if cfg.fmt == "csv":
        rows = [{k: v for k, v in row.items() if k.startswith(("input", "state"))} for row in per_input]
        return _csv(rows), passed
    return dumps(_doc(cfg, results, passed)), passed


_HAMILTONIANS = {
    "h1": (build_h1, TAU1, ("10", "11")),
    "h2": (build_h2, TAU2, ("10", "11")),
    "h3": (None, TAU3, ("100", "101", "110", "111")),
}


def cmd_holonomy(cfg: RunConfig):
    builder, tau, labels = _HAMILTONIANS[cfg.target]
    if cfg.target == "h3":
        if cfg.angle is not None:
            raise UsageError("h3 takes no phase")
        h = build_h3(cfg.j)
    else:
        phi = _angle(cfg.angle) if cfg.angle is not None else 0.0
        h = builder(phi, cfg.j)
    tau = cfg.tau if cfg.tau is not None else tau / cfg.j
    if cfg.subspace is not None:
        labels = tuple(s.strip() for s in cfg.subspace.split(","))
    try:
        s = Subspace.from_labels(labels)
        rep = holonomy_check(h, s, tau, grid=cfg.grid, tol=cfg.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ok_i, ok_ii = rep.passed
    results = {
        "hamiltonian": cfg.target,
        "terms": [[c, s.word] for c, s in h.terms],
        "subspace": list(labels),
        "tau": tau,
        "condition_i_residual": rep.condition_i_residual,
        "condition_ii_max": rep.condition_ii_max,
        "condition_i_pass": ok_i,
        "condition_ii_pass": ok_ii,
        "grid_points": rep.grid_points,
        "tol": rep.tol,
    }
    return dumps(_doc(cfg, results, rep.holonomic)), rep.holonomic


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cmd_qpt(cfg: RunConfig):
    if cfg.target == "random":
        ideal = _random_unitary(np.random.default_rng(cfg.seed), 2)
        ch = Channel.from_unitary(ideal)
        label = f"random(seed={cfg.seed})"
    else:
        spec = _gate_spec(cfg.target)
        g = realize_gate(spec)
        ideal = g.ideal_logical
        ch = induced_channel(g, cfg.leakage)
        label = str(spec)
    if cfg.lam != 1.0:
        ch = attenuate(ch, cfg.lam)
    chi = qpt_chi(ch, inputs=cfg.inputs)
    chi_th = chi_of_unitary(ideal)
    results = {
        "gate": label,
        "chi": chi.to_dict(),
        "chi_ideal": chi_th.to_dict(),
        "fit_residual": chi.residual,
        "trace": chi.trace,
        "hermiticity_error": chi.hermiticity_error(),
        "chi_fidelity_attenuated": chi_fid_attenuated(chi, chi_th),
        "chi_fidelity_unattenuated": chi_fid_unattenuated(chi, chi_th),
    }
    passed = chi.residual < 1e-8 and chi.hermiticity_error() < 1e-9
    return dumps(_doc(cfg, results, passed)), passed


def sweep_rows(kind: str, angle: float | None, steps, leakage: str = "trace") -> list[dict]:
    base = {"rz": "rz:theta={a!r}", "rx": "rx:phi={a!r}", "cnot": "cnot"}[kind].format(a=angle)
    exact = realize_gate(GateSpec.parse(f"{base}:mode=exact"))
    rows = []
    for n in steps:
        g = realize_gate(GateSpec.parse(f"{base}:mode=trotter:n={n}"))
        chi = qpt_chi(induced_channel(g, leakage))
        err = product_error(g.register_unitary, exact.register_unitary)
        rows.append(
            {
                "N": n,
                "error": err,
                "error_times_N2": err * n * n,
                "chi_fidelity_unattenuated": chi_fid_unattenuated(chi, chi_of_unitary(g.ideal_logical)),
            }
        )
    return rows


def cmd_sweep(cfg: RunConfig):
    if cfg.target == "cnot":
        if cfg.angle is not None:
            raise UsageError("cnot takes no angle")
        angle = None
    else:
        if cfg.angle is None:
            raise UsageError(f"{cfg.target} sweep needs --theta/--phi")
        angle = _angle(cfg.angle)
    steps = sorted(cfg.n)
    rows = sweep_rows(cfg.target, angle, steps, cfg.leakage)
    fids = [r["chi_fidelity_unattenuated"] for r in rows]
    monotone = all(b >= a - 1e-12 for a, b in zip(fids, fids[1:]))
    if cfg.fmt == "csv":
        for r in rows:
            r["monotone"] = monotone
        return _csv(rows), monotone
    return dumps(_doc(cfg, {"rows": rows, "monotone": monotone}, monotone)), monotone


def report_rows() -> list[dict]:
    rows = []
    for spec_text, target in TARGET_TABLE:
        spec = GateSpec.parse(spec_text)
        g = realize_gate(spec)
        chi_th = chi_of_unitary(g.ideal_logical)
        fids = {}
        for mode in ("trace", "project"):
            chi = qpt_chi(induced_channel(g, mode))
            fids[mode] = chi_fid_unattenuated(chi, chi_th)
        passing = [m for m in ("trace", "project") if abs(fids[m] - target) <= REPORT_TOL]
        rows.append(
            {
                "gate": spec.label,
                "spec": str(spec),
                "target": target,
                "chi_fidelity_trace": fids["trace"],
                "chi_fidelity_project": fids["project"],
                "status": "PASS" if passing else "FAIL",
                "passing_mode": passing[0] if passing else "",
            }
        )
    return rows


def cmd_report(cfg: RunConfig):
    rows = report_rows()
    passed = all(r["status"] == "PASS" for r in rows)
    if cfg.fmt == "csv":
        return _csv(rows), passed
    return dumps(_doc(cfg, {"tolerance": REPORT_TOL, "rows": rows}, passed)), passed


COMMANDS = {
    "gate": cmd_gate,
    "holonomy": cmd_holonomy,
    "qpt": cmd_qpt,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        text, passed = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"nhqc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
