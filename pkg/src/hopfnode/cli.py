"""Command-line experiment driver.

Every subcommand builds an :class:`ExperimentConfig`, runs it, writes CSV
data plus a JSON manifest (inputs, versions, checksums, wall time, checks)
and prints a short summary. ``hopfnode run CONFIG.json`` replays a saved
configuration; ``hopfnode report MANIFEST.json`` verifies and summarises one.
"""
import argparse
import csv
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .kernels import BACKEND
from .spectrum import Params

__all__ = ["ExperimentConfig", "CONFIG_VERSION", "run", "report", "main", "DEFAULTS"]

CONFIG_VERSION = "hopfnode-config/1"
FIG_PARAMS = {"b": 0.3, "c1": 0.0, "c2": -1.0, "eps3": 0.002, "h": 1e-4}


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one subcommand run."""

    command: str
    params: dict = field(default_factory=lambda: dict(FIG_PARAMS))
    options: dict = field(default_factory=dict)
    out: str = ""
    version: str = CONFIG_VERSION

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        if data.get("version") != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {data.get('version')!r}")
        known = {"command", "params", "options", "out", "version"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def model(self):
        p = self.params
        return Params(b=p["b"], c1=p["c1"], c2=p["c2"], eps3=p["eps3"])

    def out_path(self):
        return Path(self.out or f"out/{self.command}.csv")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else str(float(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _versions():
    import scipy
    import skimage
    return {"hopfnode": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "scikit-image": skimage.__version__, "python": platform.python_version(),
            "backend": BACKEND}


def _parse_range(text):
    """``lo:hi:step`` (inclusive of ``hi`` when it lands on the grid)."""
    lo, hi, step = (float(v) for v in text.split(":"))
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(n)]


# handlers: config -> (list of written paths, list of check dicts, summary lines)

def _checks(numbers):
    from .acceptance import CRITERIA
    results = [CRITERIA[n]() for n in numbers]
    return [r.as_dict() for r in results], [r.line() for r in results]


def _selftest(cfg):
    from . import acceptance
    from .series import compare_expansions
    from .spectrum import check_hypotheses
    quick = [acceptance.ac1(), acceptance.ac2(), acceptance.ac3(), acceptance.ac8(),
             acceptance.ac9()]
    rows = [(f"AC{r.number}", r.ok, json.dumps(r.as_dict()["observed"], sort_keys=True))
            for r in quick]
    model = cfg.model()
    hyp = check_hypotheses(model)
    rows.append(("hypotheses", hyp.all_pass, "; ".join(hyp.lines())))
    cmp = compare_expansions(model.replace(c1=0.0, c2=0.0))
    rows.append(("display_transcription", cmp["display"] <= 1e-12, repr(cmp["display"])))
    path = write_csv(cfg.out_path(), ["check", "passed", "observed"], rows)
    checks = [r.as_dict() for r in quick]
    lines = [f"{name}: {'PASS' if ok else 'FAIL'}" for name, ok, _ in rows]
    return [path], checks, lines, all(ok for _, ok, _ in rows)


def _airy(cfg):
    from .specfun import airy_scaled
    action = cfg.options.get("action", "selftest")
    if action == "selftest":
        checks, lines = _checks([1])
        path = write_csv(cfg.out_path(), ["criterion", "passed"], [(1, checks[0]["passed"])])
        return [path], checks, lines, checks[0]["passed"]
    if action == "det":
        checks, lines = _checks([3])
        path = write_csv(cfg.out_path(), ["criterion", "passed"], [(3, checks[0]["passed"])])
        return [path], checks, lines, checks[0]["passed"]
    kind = cfg.options.get("kind", "A")
    rows, lines = [], []
    for text in cfg.options.get("z", ["0"]):
        z = complex(text.replace(" ", "").replace("i", "j"))
        v = airy_scaled(z, kind)
        rows.append((z.real, z.imag, kind, v.logmag, v.phase))
        lines.append(f"{kind}({text}) = exp({v.logmag:.15g}) * exp(i {v.phase:.15g})")
    path = write_csv(cfg.out_path(), ["re_z", "im_z", "kind", "log_abs", "phase"], rows)
    return [path], [], lines, True


def _relief(cfg):
    from .spectrum import Relief, check_hypotheses
    model = cfg.model()
    paths, checks, lines = [], [], []
    if cfg.options.get("report", True):
        checks, lines = _checks([2])
        lines += check_hypotheses(model).lines()
    n = int(cfg.options.get("grid", 0))
    if n:
        bbox = cfg.options.get("bbox", [-1.5, 1.5, -1.5, 1.5])
        xs, ys = np.linspace(bbox[0], bbox[1], n), np.linspace(bbox[2], bbox[3], n)
        z = xs[None, :] + 1j * ys[:, None]
        lam = Relief("lambda", model.b).R(z + 1e-300j)
        mu = Relief("mu", model.b).R(z + 1e-300j)
        rows = ((zz.real, zz.imag, a, m) for zz, a, m in zip(z.ravel(), np.ravel(lam), np.ravel(mu)))
        paths.append(write_csv(cfg.out_path(), ["re_t", "im_t", "R_lambda", "R_mu"], rows))
    else:
        paths.append(write_csv(cfg.out_path(), ["criterion", "passed"],
                               [(2, checks[0]["passed"])] if checks else []))
    ok = all(c["passed"] for c in checks)
    return paths, checks, lines, ok


def _levels(cfg):
    from .reliefscape import level_curves
    from .spectrum import Relief, critical_point
    model = cfg.model()
    level = cfg.options.get("level")
    if level is None:
        level = critical_point(model.b)[1]
    curves = level_curves(Relief(cfg.options.get("which", "lambda"), model.b), float(level),
                          n=int(cfg.options.get("n", 401)))
    rows = [(k, z.real, z.imag) for k, c in enumerate(curves) for z in c]
    path = write_csv(cfg.out_path(), ["curve", "re_t", "im_t"], rows)
    return [path], [], [f"{len(curves)} level curves at R = {level:.10g}"], True


def _domain(cfg):
    from .reliefscape import descending_reachability
    from .spectrum import Relief, real_crossings
    model = cfg.model()
    seed = cfg.options.get("seed")
    if seed is None:
        seed = real_crossings(model.b)[0]
    n = int(cfg.options.get("n", 401))
    reach = descending_reachability(complex(seed), [Relief("lambda", model.b), Relief("mu", model.b)],
                                    n=n, radius=int(cfg.options.get("radius", 5)))
    mask = reach.intersection
    xs, ok = mask.real_axis()
    rows = [(x, int(o)) for x, o in zip(xs, ok)]
    path = write_csv(cfg.out_path(), ["t", "reachable"], rows)
    lo, hi = (float(xs[ok].min()), float(xs[ok].max())) if ok.any() else (math.nan, math.nan)
    return [path], [], [f"real reach from {seed:.6g}: [{lo:.4f}, {hi:.4f}]"] + list(reach.notes), True


def _trace(cfg):
    from .flow import distinguished, exit_time, to_microscope
    model = cfg.model()
    which = cfg.options.get("which", "minus")
    traj = distinguished(model, which, h=cfg.params["h"])
    track = to_microscope(traj, model)
    every = int(cfg.options.get("every", 10))
    rows = zip(traj.t[::every], traj.x[::every], traj.y[::every],
               track.rho[::every], track.theta[::every])
    path = write_csv(cfg.out_path(), ["t", "x", "y", "rho", "theta"], rows)
    checks, lines = ([], [])
    if cfg.options.get("averaging"):
        checks, lines = _checks([9])
    lines = [f"{which}: exit at {exit_time(traj, 0.05)}, halted={traj.halted}"] + lines
    return [path], checks, lines, all(c["passed"] for c in checks)


def _explicit(cfg):
    from .cquad import explicit_solution
    from .flow import distinguished
    model = cfg.model()
    sign = cfg.options.get("sign", "-")
    ts = _parse_range(cfg.options.get("sweep", "-0.5:0.25:0.05"))
    traj = distinguished(model, sign, h=cfg.params["h"], check=False)
    rows = []
    for t in ts:
        x, y = explicit_solution(model, t, sign)
        xn, yn = traj.at(t)
        rel = math.hypot(x - xn, y - yn) / math.hypot(xn, yn)
        rows.append((t, x, y, xn, yn, rel))
    path = write_csv(cfg.out_path(), ["t", "x", "y", "x_rk4", "y_rk4", "rel_diff"], rows)
    numbers = ([5] if cfg.options.get("compare") else []) + ([10] if cfg.options.get("lemmas") else [])
    checks, lines = _checks(numbers) if numbers else ([], [])
    lines = [f"max relative difference {max(r[-1] for r in rows):.3g}"] + lines
    return [path], checks, lines, all(c["passed"] for c in checks)


def _expand(cfg):
    from .series import compare_expansions, xplus_at_b
    model = cfg.model()
    order = int(cfg.options.get("order", 9))
    xs, ys = xplus_at_b(model, order)
    rows = [("closed", k, xs[k].real, ys[k].real) for k in range(3, order + 1, 3)]
    checks, lines = [], []
    if cfg.options.get("compare"):
        cmp = compare_expansions(model)
        fit = cmp["fit_detail"]
        if fit is not None:
            rows += [("fit", k, fit.x[k].real, fit.y[k].real) for k in range(3, 10, 3)]
        checks, lines = _checks([6])
    path = write_csv(cfg.out_path(), ["source", "eps_power", "x", "y"], rows)
    lines = [f"{s:6s} eps^{k}: x = {x:.8g}, y = {y:.8g}" for s, k, x, y in rows] + lines
    return [path], checks, lines, all(c["passed"] for c in checks)


def _io_rows(model, entries, h):
    from .entryexit import NoExitError, conjectured_exit, hfn_band, measure_exit
    rows = []
    for t_e in entries:
        band = hfn_band(model, t_e)
        lo, hi = (band.values * 2)[:2]
        try:
            measured = measure_exit(model, t_e, h=h)
        except NoExitError:
            measured = None
        rows.append((t_e, conjectured_exit(model, t_e).value, lo, hi, measured))
    return rows


def _entryexit(cfg):
    model = cfg.model()
    rows = _io_rows(model, _parse_range(cfg.options.get("sweep", "-0.9:-0.05:0.05")),
                    cfg.params["h"])
    path = write_csv(cfg.out_path(), ["t_e", "predicted", "band_lo", "band_hi", "measured"], rows)
    checks, lines = _checks([8])
    lines = [f"t_e={r[0]:+.3f} predicted={r[1]:.4f} band=[{r[2]:.4f}, {r[3]:.4f}] "
             f"measured={_fmt(r[4])}" for r in rows] + lines
    return [path], checks, lines, all(c["passed"] for c in checks)


def _figure_traj(cfg):
    from .flow import distinguished
    model = cfg.model()
    every = int(cfg.options.get("every", 10))
    rows = []
    for sign in ("-", "+"):
        traj = distinguished(model, sign, h=cfg.params["h"], check=False)
        rows += [(sign, t, x, y) for t, x, y in
                 zip(traj.t[::every], traj.x[::every], traj.y[::every])]
    path = write_csv(cfg.out_path(), ["which", "t", "x", "y"], rows)
    checks, lines = _checks([4])
    return [path], checks, lines, all(c["passed"] for c in checks)


def _io_sweep(cfg):
    from .acceptance import AC7_ENTRIES
    model = cfg.model()
    rows = _io_rows(model, AC7_ENTRIES, cfg.params["h"])
    rows = [r + (None if r[4] is None else r[4] - r[1],) for r in rows]
    path = write_csv(cfg.out_path(),
                     ["t_e", "predicted", "band_lo", "band_hi", "measured", "delta"], rows)
    checks, lines = _checks([7])
    return [path], checks, lines, all(c["passed"] for c in checks)


HANDLERS = {
    "selftest": _selftest, "airy": _airy, "relief": _relief, "levels": _levels,
    "domain": _domain, "trace": _trace, "explicit": _explicit, "expand": _expand,
    "entryexit": _entryexit, "figure-traj": _figure_traj, "io-sweep": _io_sweep,
}

DEFAULTS = {
    "selftest": {}, "airy": {"action": "selftest"}, "relief": {"report": True},
    "levels": {}, "domain": {}, "trace": {"which": "minus"},
    "explicit": {"compare": True}, "expand": {"compare": True}, "entryexit": {},
    "figure-traj": {}, "io-sweep": {},
}


def run(config):
    """Execute ``config``; returns ``(status, manifest path)``."""
    if config.command not in HANDLERS:
        raise ValueError(f"unknown command {config.command!r}")
    start = time.perf_counter()
    paths, checks, lines, ok = HANDLERS[config.command](config)
    wall = time.perf_counter() - start
    out = config.out_path()
    manifest_path = out.with_name(out.stem + ".manifest.json")
    manifest = {
        "format": CONFIG_VERSION,
        "config": config.to_dict(),
        "versions": _versions(),
        "outputs": {Path(p).name: _sha256(p) for p in paths},
        "wall_time": round(wall, 3),
        "checks": checks,
        "passed": bool(ok),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for line in lines:
        print(line)
    print(f"wrote {', '.join(str(p) for p in paths)} and {manifest_path}")
    return (0 if ok else 1), manifest_path


def report(manifest_path):
    """Verify checksums and print one line per recorded check; returns the exit status."""
    path = Path(manifest_path)
    try:
        manifest = json.loads(path.read_text())
        outputs = manifest["outputs"]
        checks = manifest.get("checks", [])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"corrupt or missing manifest {path}: {exc}")
        return 2
    status = 0
    for name, digest in sorted(outputs.items()):
        target = path.parent / name
        if not target.exists():
            print(f"INTEGRITY FAIL {name}: missing")
            status = 2
        elif _sha256(target) != digest:
            print(f"INTEGRITY FAIL {name}: checksum mismatch")
            status = 2
        else:
            print(f"integrity ok {name}")
    cfg = manifest.get("config", {})
    print(f"command {cfg.get('command')} params {json.dumps(cfg.get('params'), sort_keys=True)} "
          f"wall {manifest.get('wall_time')} s")
    for c in checks:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"AC{c['number']} {mark} {c['title']}: observed {json.dumps(c['observed'])} "
              f"expected {json.dumps(c['expected'])}")
        if not c["passed"] and status == 0:
            status = 1
    if cfg.get("command") in ("io-sweep", "entryexit"):
        csv_path = path.parent / next(iter(outputs))
        with open(csv_path) as fh:
            for row in csv.DictReader(fh):
                print("  " + "  ".join(f"{k}={v}" for k, v in row.items()))
    return status


def _common(p):
    p.add_argument("--b", type=float, default=FIG_PARAMS["b"])
    p.add_argument("--eps3", type=float, default=FIG_PARAMS["eps3"])
    p.add_argument("--c", default="0,-1", help="c1,c2")
    p.add_argument("--h", type=float, default=FIG_PARAMS["h"], help="RK4 step")
    p.add_argument("--out", default="", help="CSV path (manifest goes next to it)")
    p.add_argument("--save-config", default="", help="also write the config JSON here")


def build_parser():
    parser = argparse.ArgumentParser(prog="hopfnode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("selftest", help="fast invariant checks"))
    p = sub.add_parser("airy", help="Airy suite or evaluation")
    p.add_argument("action", choices=["selftest", "eval", "det"], nargs="?", default="selftest")
    p.add_argument("--z", action="append", default=None, help="complex argument, e.g. 1+2j")
    p.add_argument("--kind", default="A", choices=["A", "A'", "B", "B'"])
    _common(p)
    p = sub.add_parser("relief", help="relief numbers and grids")
    p.add_argument("--grid", type=int, default=0, help="grid size per axis (0: none)")
    p.add_argument("--report", action=argparse.BooleanOptionalAction, default=True)
    _common(p)
    p = sub.add_parser("levels", help="level curves of the relief")
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--which", default="lambda", choices=["lambda", "mu"])
    p.add_argument("--n", type=int, default=401)
    _common(p)
    p = sub.add_parser("domain", help="descending reachability")
    p.add_argument("--seed", type=float, default=None)
    p.add_argument("--n", type=int, default=401)
    p.add_argument("--radius", type=int, default=5)
    _common(p)
    p = sub.add_parser("trace", help="distinguished trajectory with microscope coordinates")
    p.add_argument("--which", default="minus", choices=["minus", "plus"])
    p.add_argument("--every", type=int, default=10)
    p.add_argument("--averaging", action="store_true")
    _common(p)
    p = sub.add_parser("explicit", help="explicit Airy solution against RK4")
    p.add_argument("--sign", default="-", choices=["-", "+"])
    p.add_argument("--sweep", default="-0.5:0.25:0.05")
    p.add_argument("--compare", action="store_true")
    p.add_argument("--lemmas", action="store_true")
    _common(p)
    p = sub.add_parser("expand", help="expansions at t = b")
    p.add_argument("--order", type=int, default=9)
    p.add_argument("--compare", action="store_true")
    _common(p)
    p = sub.add_parser("entryexit", help="entrance-exit sweep")
    p.add_argument("--sweep", default="-0.9:-0.05:0.05")
    _common(p)
    _common(sub.add_parser("figure-traj", help="trajectory figure data"))
    _common(sub.add_parser("io-sweep", help="conjectured entrance-exit sweep"))
    p = sub.add_parser("report", help="verify and summarise a manifest")
    p.add_argument("manifest")
    p = sub.add_parser("run", help="run a saved config or a named default")
    p.add_argument("target", help="config JSON path or subcommand name")
    return parser


def _config_from_args(args):
    c1, c2 = (float(v) for v in args.c.split(","))
    params = {"b": args.b, "c1": c1, "c2": c2, "eps3": args.eps3, "h": args.h}
    skip = {"command", "b", "eps3", "c", "h", "out", "save_config"}
    options = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    return ExperimentConfig(args.command, params, options, args.out)


def _glue_ranges(argv):
    """Attach ``--sweep`` values such as ``-0.9:-0.05:0.05`` that argparse reads as options."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--sweep":
            out.append(f"--sweep={next(it, '')}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_ranges(argv))
    try:
        if args.command == "report":
            return report(args.manifest)
        if args.command == "run":
            target = Path(args.target)
            if target.suffix == ".json" and target.exists():
                cfg = ExperimentConfig.loads(target.read_text())
            elif args.target in HANDLERS:
                cfg = ExperimentConfig(args.target, dict(FIG_PARAMS), dict(DEFAULTS[args.target]))
            else:
                print(f"unknown run target {args.target!r}", file=sys.stderr)
                return 2
        else:
            cfg = _config_from_args(args)
            if args.save_config:
                Path(args.save_config).write_text(cfg.dumps() + "\n")
        return run(cfg)[0]
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
