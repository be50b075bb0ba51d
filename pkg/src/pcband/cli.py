"""``pcband`` command line.

Exit codes: 0 success, 1 operational error (bad input, I/O), 2 a verification
check reported a violated inequality. Every JSON report carries the tool
version, a hash of the run configuration and the tolerances used; identical
arguments give byte-identical JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from pcband import __version__

EXIT_OK, EXIT_ERROR, EXIT_FINDING = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        val = kind(text)
        if val <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return val
    return conv


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pcband", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"pcband {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bands1d", help="1D bands and gaps of E'' + lam*eps*E = 0")
    b.add_argument("--profile", required=True)
    b.add_argument("--n-bands", type=_positive(int), default=10)
    b.add_argument("--lambda-max", type=_positive(float))
    b.add_argument("--tol", type=_positive(float), default=1e-11)
    b.add_argument("--out")

    g = sub.add_parser("gaps2d", help="separable 2D gap report")
    g.add_argument("--profile1", required=True)
    g.add_argument("--profile2", required=True)
    g.add_argument("--lambda-max", type=_positive(float), default=200.0)
    g.add_argument("--lambda-step", type=_positive(float), default=0.05)
    g.add_argument("--c-count", type=int, default=33,
                   help="size of the extra shift grid (0 uses only the proof's triple)")
    g.add_argument("--margin", type=_positive(float), default=1e-8)
    g.add_argument("--tol", type=_positive(float), default=1e-11)
    g.add_argument("--out")

    w = sub.add_parser("planewave", help="plane-wave band intervals of a 2D profile")
    w.add_argument("--profile", required=True)
    w.add_argument("--n-bands", type=_positive(int), default=10)
    w.add_argument("--bz-grid", type=_positive(int), default=17)
    w.add_argument("--cutoff", type=_positive(int), default=8)
    w.add_argument("--out")

    v = sub.add_parser("verify", help="numerical check of one lemma")
    v.add_argument("--lemma", required=True, choices=["l1.8", "l1.10", "l1.11", "l1.12"])
    v.add_argument("--profile")
    v.add_argument("--c", type=float, action="append",
                   help="shift for l1.12 (repeatable; default an 11-point grid)")
    v.add_argument("--n-max", type=_positive(int), default=10)
    v.add_argument("--instances", type=_positive(int), default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")

    c = sub.add_parser("constants", help="constant ledger for a given d0")
    c.add_argument("--d0", type=float, required=True)
    c.add_argument("--out")
    return p


def _config_hash(args: argparse.Namespace) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "out"}
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else repr(val)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _emit(args, report: dict, tolerances: dict, name: str) -> None:
    doc = {"tool": "pcband", "version": __version__, "command": args.command,
           "config_hash": _config_hash(args), "tolerances": tolerances, **report}
    text = json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _out_file(args, name: str):
    if not args.out:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# -- subcommands ------------------------------------------------------------


def _bands1d(args) -> int:
    from pcband import hill1d
    from pcband.profiles import load_profile_1d

    hp = hill1d.HillProblem(load_profile_1d(args.profile))
    bands = [hill1d.band(hp, n, args.tol) for n in range(1, args.n_bands + 1)]
    report = {"bands": [{"n": b.index, "lo": b.lo, "hi": b.hi, "alpha_lo": b.lo_alpha,
                         "alpha_hi": b.hi_alpha} for b in bands]}
    gap_list = None
    if args.lambda_max:
        gap_list = hill1d.gaps(hp, args.lambda_max, args.tol).gaps
        report["lambda_max"] = args.lambda_max
        report["gaps"] = [list(g) for g in gap_list]
    if (path := _out_file(args, "bands.csv")) is not None:
        hill1d.write_bands_csv(path, bands)
        if gap_list is not None:
            hill1d.write_gaps_csv(path.with_name("gaps.csv"), gap_list)
    _emit(args, report, {"tol": args.tol}, "bands1d.json")
    return EXIT_OK


def _gaps2d(args) -> int:
    from pcband import separable2d as s2
    from pcband.profiles import load_profile_1d

    sp = s2.SeparableProfile2D(load_profile_1d(args.profile1), load_profile_1d(args.profile2))
    grid = s2.default_c_grid(sp, args.c_count) if args.c_count > 0 else ()
    rep = s2.gap_report(sp, args.lambda_max, args.lambda_step, grid, args.margin, args.tol)
    if (path := _out_file(args, "gaps2d.csv")) is not None:
        rep.write_csv(path)
    _emit(args, rep.as_dict(), {"tol": args.tol, "margin": args.margin}, "gaps2d.json")
    return EXIT_OK


def _planewave(args) -> int:
    from pcband import planewave2d as pw
    from pcband.profiles import load_profile_2d

    eps = load_profile_2d(args.profile)
    rep = pw.overlap_check(eps, args.n_bands, args.bz_grid, args.cutoff)
    if (path := _out_file(args, "planewave.csv")) is not None:
        pw.write_eigs_csv(path, eps, args.bz_grid, args.cutoff, args.n_bands)
    _emit(args, {"bands": pw.band_report(rep), "overlaps": rep.overlaps,
                 "holes": [list(h) for h in rep.holes]},
          {"cutoff": args.cutoff, "bz_grid": args.bz_grid}, "planewave.json")
    return EXIT_OK


def _verify(args) -> int:
    if args.lemma in ("l1.8", "l1.10", "l1.12") and not args.profile:
        raise ValueError(f"--profile is required for {args.lemma}")
    report, tolerances, finding = _VERIFIERS[args.lemma](args)
    report = {"lemma": args.lemma, **report}
    _emit(args, report, tolerances, f"verify_{args.lemma}.json")
    return EXIT_FINDING if finding else EXIT_OK


def _verify_l18(args):
    from pcband.liouville import comparison_check
    from pcband.profiles import load_profile_1d

    tol = 1e-6
    rep = comparison_check(load_profile_1d(args.profile), args.n_max, (0.0, math.pi / 2, math.pi))
    bad = [r for r in rep.rows if r[4] > rep.theta_sup + tol]
    report = {"instances": len(rep.rows), "theta_sup": rep.theta_sup, "A": rep.A,
              "max_difference": rep.max_difference, "holds_stated": not bad,
              "holds_corrected": not bad,
              "counterexamples": [{"n": n, "alpha": a, "lambda": lam, "lambda_free": ls}
                                  for n, a, lam, ls, _ in bad]}
    return report, {"violation": tol}, bool(bad)


def _verify_l110(args):
    from pcband.liouville import inclusion_check
    from pcband.profiles import load_profile_1d

    tol = 1e-6
    rows = inclusion_check(load_profile_1d(args.profile), args.n_max)
    bad = [r for r in rows if r.applies and not r.contained(tol)]
    report = {"instances": sum(r.applies for r in rows), "holds_stated": not bad,
              "holds_corrected": not bad,
              "rows": [{"n": r.n, "inner": [r.inner_lo, r.inner_hi], "band": [r.band_lo, r.band_hi],
                        "applies": r.applies} for r in rows],
              "counterexamples": [{"n": r.n} for r in bad]}
    return report, {"endpoint": tol}, bool(bad)


def _verify_l111(args):
    from pcband.constants import check_shift_lemma, random_shift_instance

    rng = np.random.default_rng(args.seed)
    bad = []
    for _ in range(args.instances):
        inst = random_shift_instance(rng)
        res = check_shift_lemma(inst)
        if not res.holds:
            bad.append({"lambda": inst.lam, "b": inst.b, "b_tilde": inst.b_tilde, "c": inst.c,
                        "b0": inst.b0, "b1": inst.b1, "n": inst.n, "m": res.violating_m})
    report = {"instances": args.instances, "seed": args.seed, "holds_stated": not bad,
              "holds_corrected": not bad, "counterexamples": bad}
    return report, {"search": "exhaustive"}, bool(bad)


def _verify_l112(args):
    from pcband.constants import check_A_bounds
    from pcband.profiles import load_profile_1d

    eps0 = load_profile_1d(args.profile)
    lo, hi = eps0.min_value, eps0.max_value
    shifts = args.c if args.c else [float(c) for c in np.linspace(-lo / 2, lo / 2, 11)]
    reps = [check_A_bounds(eps0, c, lo, hi) for c in shifts]
    stated = all(r.holds_stated for r in reps)
    corrected = all(r.holds_corrected for r in reps)
    report = {"instances": len(reps), "holds_stated": stated, "holds_corrected": corrected,
              "d1": lo, "d2": hi, "results": [r.as_dict() for r in reps],
              "counterexamples": [r.as_dict() for r in reps
                                  if not (r.holds_stated and r.holds_corrected)]}
    return report, {"relative": 1e-12}, not (stated and corrected)


_VERIFIERS = {"l1.8": _verify_l18, "l1.10": _verify_l110, "l1.11": _verify_l111,
              "l1.12": _verify_l112}


def _constants(args) -> int:
    from pcband.constants import ledger, margin_chain

    led = ledger(args.d0)
    _emit(args, {"ledger": led.as_dict(), "chain_at_Lambda0": margin_chain(led, led.Lambda0)},
          {"arithmetic": "float64"}, "constants.json")
    return EXIT_OK


_COMMANDS = {"bands1d": _bands1d, "gaps2d": _gaps2d, "planewave": _planewave,
             "verify": _verify, "constants": _constants}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"pcband {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
