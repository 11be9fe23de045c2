# -*- coding: utf-8 -*-
"""
Command line entry point.

    qdcrypt decoy --source tpe --eta 0.3 --sweep distance 0 150 76 --out decoy.csv
    qdcrypt tokens --source la --sweep eta 0.1 1.0 10 --workers 4
    qdcrypt figures fig2b fig10 --out figures/
    qdcrypt check advantage qkd --out checks/
    qdcrypt selftest
"""
import argparse
import logging
import os
import sys
from dataclasses import replace
from functools import partial
from math import exp
from typing import IO, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import qdcryptpy
from qdcryptpy._bitcommit import best_pds_margin, l_prime, security_parameters, honest_transmission
from qdcryptpy._coinflip import (SWEEP_COLUMNS as COINFLIP_COLUMNS, CoinFlipConfig, cheat_bounds, classical_bound,
                                 evaluate_point, helstrom, honest_abort, usd_probability)
from qdcryptpy._config import PRIMITIVES, RunConfig, SweepSpec, load_config_file, split_sweep
from qdcryptpy._errors import ConfigError, QdCryptError
from qdcryptpy._numlin import binary_entropy, projector
from qdcryptpy._qkd import ChannelParams, channel_transmittance, key_rate_bb84, key_rate_twinfield, optimal_pds_rate
from qdcryptpy._references import REPORTS
from qdcryptpy._sources import (PRESETS, PdsModel, brightness_purity, describe, populations_from_correlations,
                                source_efficiency)
from qdcryptpy._sweep import SweepResult, parallel_map
from qdcryptpy._tokens import best_pds_tolerance, honest_loss, source_tolerance

logger = logging.getLogger(__name__)

PDS_BEST = "pds-best"

QKD_COLUMNS = ("source", "source_efficiency", "distance_km", "rate", "Q", "E", "Q1", "e1", "mu")
TOKEN_COLUMNS = ("source", "source_efficiency", "distance_km", "honest_loss", "noise_tolerance", "gap", "mu")
BITCOMMIT_COLUMNS = ("source", "source_efficiency", "distance_km", "eta_c", "m2", "m3", "L_prime", "delta",
                     "lambda", "margin", "secure", "N_min", "N_sufficient", "mu")

ASSUMPTIONS = {
    "log_base": 2,
    "token_choi_convention": "input states enter conjugated; Tr_out J = 1",
    "coinflip_encoder": "splitter reflectivity y (c=0) or 1-y (c=1), phase pi(alpha+c)",
    "coinflip_abort_model": "P_ab = Z + (1-Z) e/2 with Z = (1-p_click)^N",
    "coinflip_bound_forms": "half-abort = 1-sqrt(P_ab/2), half-root = 1-sqrt(P_ab)/2",
}


def _is_best(cfg: RunConfig) -> bool:
    return cfg.source.lower() == PDS_BEST


def _qkd_row(cfg: RunConfig, variable: Optional[str] = None) -> List:
    channel = cfg.channel()
    if _is_best(cfg):
        r = optimal_pds_rate(cfg.primitive, channel, cfg.distance)
        return ["pds-rp(best)", 1.0 - exp(-r.mu), cfg.distance, r.rate, r.Q, r.E, r.Q1, r.e1, r.mu]
    src = cfg.source_model()
    if cfg.primitive == "twinfield":
        r = key_rate_twinfield(src, channel, cfg.distance, cfg.twinfield())
    else:
        r = key_rate_bb84(src, channel, cfg.distance, decoy="none" if cfg.primitive == "bb84" else "infinite")
    mu = src.mu if cfg.is_pds() else None
    return [describe(src), source_efficiency(src), cfg.distance, r.rate, r.Q, r.E, r.Q1, r.e1, mu]


def _token_row(cfg: RunConfig, variable: Optional[str] = None) -> List:
    channel = cfg.channel()
    if _is_best(cfg):
        tol, mu = best_pds_tolerance("randomized", cfg.distance, channel)
        return ["pds-rp(best)", 1.0 - exp(-mu), cfg.distance, None, tol, None, mu]
    src = cfg.source_model()
    t = channel_transmittance(cfg.distance, channel) * channel.eta_d
    r = source_tolerance(src, cfg.distance, channel)
    mu = src.mu if cfg.is_pds() else None
    return [describe(src), source_efficiency(src), cfg.distance, honest_loss(src, t), r.min_error, r.gap, mu]


def _coinflip_row(cfg: RunConfig, variable: Optional[str] = None) -> List:
    if _is_best(cfg):
        raise ConfigError("coin flipping has no best-Poisson search; give --mu with --source pds")
    src = cfg.source_model()
    cf = CoinFlipConfig(src, y=cfg.y, N=cfg.N, e=cfg.coinflip_error(), channel=cfg.channel(),
                        distance_km=cfg.distance, dark_counts=cfg.z_dark_counts,
                        bound_form=cfg.classical_bound_form)
    if variable != "y":
        return evaluate_point(cf, cfg.P_ab) + [source_efficiency(src)]
    # a y sweep shows the unbalanced bounds at fixed N
    b = cheat_bounds(src, cf.y, cf.N)
    p_ab = honest_abort(src, cf.channel, cf.distance_km, cf.N, cf.e, cf.dark_counts)
    bound = classical_bound(p_ab, cf.bound_form)
    x = src.mu if cfg.is_pds() else src.eta
    return [cf.distance_km, x, cf.N, cf.y, b.p_alice, b.p_bob, p_ab, bound, b.cheat < bound, b.attack_label,
            False, source_efficiency(src)]


def _bitcommit_row(cfg: RunConfig, variable: Optional[str] = None) -> List:
    params = cfg.bitcommit()
    channel = cfg.channel()
    eta_c = honest_transmission(channel, cfg.distance)
    if _is_best(cfg):
        margin, mu = best_pds_margin(params, channel, cfg.distance)
        return ["pds-rp(best)", 1.0 - exp(-mu), cfg.distance, eta_c, None, None, None, None, None,
                margin, margin > 0, None, None, mu]
    src = cfg.source_model()
    r = security_parameters(params.for_source(src, eta_c))
    mu = src.mu if cfg.is_pds() else None
    return [describe(src), source_efficiency(src), cfg.distance, eta_c, r.m2, r.m3, r.L_prime, r.delta, r.lam,
            r.condition_margin, r.secure, r.N_min, r.N_sufficient, mu]


ROWS: Dict[str, Tuple[Callable[[RunConfig, Optional[str]], List], Sequence[str]]] = {
    "bb84": (_qkd_row, QKD_COLUMNS),
    "decoy": (_qkd_row, QKD_COLUMNS),
    "twinfield": (_qkd_row, QKD_COLUMNS),
    "tokens": (_token_row, TOKEN_COLUMNS),
    "coinflip": (_coinflip_row, COINFLIP_COLUMNS + ("source_efficiency",)),
    "bitcommit": (_bitcommit_row, BITCOMMIT_COLUMNS),
}


QKD_SWEEPS = ("eta", "mu", "distance")
SWEEPABLE = {
    "bb84": QKD_SWEEPS, "decoy": QKD_SWEEPS, "twinfield": QKD_SWEEPS, "tokens": QKD_SWEEPS,
    "coinflip": QKD_SWEEPS + ("y", "N", "P_ab"),
    "bitcommit": QKD_SWEEPS + ("gamma", "epsilon"),
}


def _at(x: float, config: RunConfig, variable: Optional[str]) -> List:
    cfg = config
    if variable is not None:
        cfg = replace(config, **{variable: int(round(x)) if variable == "N" else x})
    fn, _ = ROWS[cfg.primitive]
    return [x] + list(fn(cfg, variable))


def run(config: RunConfig) -> SweepResult:
    """
    Evaluate one primitive over the configured sweep (or at a single point)
    and write the CSV when ``out`` is set.
    """
    if config.sweep is not None:
        variable, grid = split_sweep(config.sweep)
        if variable not in SWEEPABLE[config.primitive]:
            raise ConfigError(f"{config.primitive} cannot sweep {variable!r}; "
                              f"choose from {SWEEPABLE[config.primitive]}")
    else:
        variable, grid = None, [config.distance]
    _, columns = ROWS[config.primitive]
    logger.info("%s: %d points for %s", config.primitive, len(grid), config.source)
    rows = parallel_map(partial(_at, config=config, variable=variable), grid, config.workers)
    rows.sort(key=lambda r: r[0])
    meta = dict(config.echo())
    meta.update(ASSUMPTIONS)
    meta["version"] = qdcryptpy.version
    meta.pop("out", None)
    meta.pop("workers", None)
    result = SweepResult([variable or "distance"] + list(columns), rows, meta)
    if config.out:
        result.write_csv(config.out)
    return result


ETA_STEPS = [0.01] + [round(0.1 * k, 1) for k in range(1, 11)]


def _curve(out_dir: str, name: str, workers: int, plot: Tuple[str, str], **kw) -> str:
    cfg = RunConfig(workers=workers, **kw)
    res = run(cfg)
    res.metadata["plot_x"], res.metadata["plot_y"] = plot
    res.metadata["figure"] = name.split("_", 1)[0]
    return res.write_csv(os.path.join(out_dir, f"{name}.csv"))


def _fig_qkd(scheme: str, sources: Sequence[str], max_km: float):
    def make(out_dir: str, workers: int, tag: str) -> List[str]:
        sweep = SweepSpec("distance", 0.0, max_km, 101)
        paths = []
        for src in sources:
            for eta in ETA_STEPS:
                paths.append(_curve(out_dir, f"{tag}_{src}_eta{eta:g}", workers, ("distance", "rate"),
                                    primitive=scheme, source=src, eta=eta, sweep=sweep))
        paths.append(_curve(out_dir, f"{tag}_pds-best", workers, ("distance", "rate"),
                            primitive=scheme, source=PDS_BEST, sweep=sweep))
        return paths
    return make


def _fig_efficiency(primitive: str, sources: Sequence[str], pds_sources: Sequence[str], plot_y: str,
                    steps: int = 19, mu_max: float = 1.5):
    def make(out_dir: str, workers: int, tag: str) -> List[str]:
        paths = []
        for src in sources:
            paths.append(_curve(out_dir, f"{tag}_{src}", workers, ("source_efficiency", plot_y),
                                primitive=primitive, source=src, sweep=SweepSpec("eta", 0.05, 1.0, steps)))
        for src in pds_sources:
            paths.append(_curve(out_dir, f"{tag}_{src}", workers, ("source_efficiency", plot_y),
                                primitive=primitive, source=src, sweep=SweepSpec("mu", 0.02, mu_max, steps)))
        return paths
    return make


def _fig_token_collection(out_dir: str, workers: int, tag: str) -> List[str]:
    paths = [_curve(out_dir, f"{tag}_{src}", workers, ("eta", "noise_tolerance"),
                    primitive="tokens", source=src, sweep=SweepSpec("eta", 0.1, 1.0, 19))
             for src in ("re", "la", "tpe")]
    paths.append(_curve(out_dir, f"{tag}_pds-best", workers, ("distance", "noise_tolerance"),
                        primitive="tokens", source=PDS_BEST))
    return paths


def _fig_token_distance(out_dir: str, workers: int, tag: str) -> List[str]:
    sweep = SweepSpec("distance", 0.0, 50.0, 11)
    paths = [_curve(out_dir, f"{tag}_{src}", workers, ("distance", "noise_tolerance"),
                    primitive="tokens", source=src, sweep=sweep) for src in ("re", "la", "tpe")]
    paths.append(_curve(out_dir, f"{tag}_pds-best", workers, ("distance", "noise_tolerance"),
                        primitive="tokens", source=PDS_BEST, sweep=sweep))
    return paths


def _fig_coinflip_distance(out_dir: str, workers: int, tag: str) -> List[str]:
    sweep = SweepSpec("distance", 0.0, 120.0, 25)
    paths = []
    for src in ("re", "la", "tpe"):
        for eta in ETA_STEPS[1:]:
            paths.append(_curve(out_dir, f"{tag}_{src}_eta{eta:g}", workers, ("distance", "p_bob"),
                                primitive="coinflip", source=src, eta=eta, P_ab=0.025, e=0.015, sweep=sweep))
    return paths


def _fig_bitcommit_distance(out_dir: str, workers: int, tag: str) -> List[str]:
    sweep = SweepSpec("distance", 0.0, 100.0, 51)
    paths = []
    for src in ("la", "tpe"):
        for eta in ETA_STEPS:
            paths.append(_curve(out_dir, f"{tag}_{src}_eta{eta:g}", workers, ("distance", "margin"),
                                primitive="bitcommit", source=src, eta=eta, sweep=sweep))
    paths.append(_curve(out_dir, f"{tag}_pds-best", workers, ("distance", "margin"),
                        primitive="bitcommit", source=PDS_BEST, sweep=sweep))
    return paths


FIGURES: Dict[str, Callable[[str, int, str], List[str]]] = {
    "fig2a": _fig_qkd("bb84", ("la", "tpe"), 150.0),
    "fig2b": _fig_qkd("decoy", ("la", "tpe"), 200.0),
    "fig2c": _fig_qkd("twinfield", ("re",), 400.0),
    "fig4a": _fig_efficiency("tokens", ("re", "la", "tpe"), ("pds", "pds-fixed"), "noise_tolerance", 10),
    "fig4b": _fig_token_collection,
    "fig4c": _fig_token_distance,
    "fig8": _fig_efficiency("coinflip", ("re", "la", "tpe"), ("pds",), "p_bob", 19, 1.0),
    "fig9": _fig_coinflip_distance,
    "fig10": _fig_efficiency("bitcommit", ("la", "tpe"), ("pds",), "margin", 39, 3.0),
    "fig11": _fig_bitcommit_distance,
}

PLOT_SCRIPT = '''#!/usr/bin/env python3
# Plots every CSV written by `qdcrypt figures` in this directory, one PNG per figure.
import csv
import glob
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    meta, lines = {}, []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("# "):
                k, _, v = line[2:].partition(": ")
                meta[k] = v.strip()
            else:
                lines.append(line)
    return meta, list(csv.DictReader(lines))


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    figures = defaultdict(list)
    for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
        meta, rows = read(path)
        figures[meta.get("figure", "misc")].append((os.path.basename(path)[:-4], meta, rows))
    for fig, curves in figures.items():
        plt.figure(figsize=(6, 4))
        for name, meta, rows in curves:
            x, y = meta.get("plot_x"), meta.get("plot_y")
            pts = [(float(r[x]), float(r[y])) for r in rows if r.get(x) and r.get(y)]
            if len(pts) == 1:
                plt.axhline(pts[0][1], linestyle="--", label=name)
            elif pts:
                plt.plot(*zip(*pts), label=name)
        plt.xlabel(curves[0][1].get("plot_x", ""))
        plt.ylabel(curves[0][1].get("plot_y", ""))
        if curves[0][1].get("plot_y") == "rate":
            plt.yscale("log")
        plt.legend(fontsize=5)
        plt.tight_layout()
        plt.savefig(os.path.join(here, fig + ".png"), dpi=150)
        plt.close()


if __name__ == "__main__":
    main()
'''


def figures(ids: Sequence[str], out_dir: str, workers: int = 1) -> List[str]:
    """Write one CSV per curve of each requested figure, plus the plotting helper."""
    wanted = list(FIGURES) if "all" in ids else list(ids)
    unknown = [i for i in wanted if i not in FIGURES]
    if unknown:
        raise ConfigError(f"unknown figure id(s) {unknown}; known: {sorted(FIGURES)}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for fid in wanted:
        logger.info("figure %s", fid)
        paths.extend(FIGURES[fid](out_dir, workers, fid))
    helper = os.path.join(out_dir, "plot_figures.py")
    with open(helper, "w", encoding="utf-8") as f:
        f.write(PLOT_SCRIPT)
    return paths


def check(ids: Sequence[str], out_dir: str, workers: int = 1) -> Tuple[List[str], bool]:
    """
    Run the benchmark checks, one CSV each.

    :return: the written paths, and whether the defaults met every published value
    """
    wanted = list(REPORTS) if "all" in ids else list(ids)
    unknown = [i for i in wanted if i not in REPORTS]
    if unknown:
        raise ConfigError(f"unknown check(s) {unknown}; known: {sorted(REPORTS)}")
    paths, ok = [], True
    for cid in wanted:
        logger.info("check %s", cid)
        res = REPORTS[cid](workers=workers)
        res.metadata.update(ASSUMPTIONS)
        res.metadata["version"] = qdcryptpy.version
        ok = ok and bool(res.metadata["default_within_tolerance"])
        paths.append(res.write_csv(os.path.join(out_dir, f"check_{cid}.csv")))
    return paths, ok


def _check_presets() -> Tuple[bool, str]:
    table = {"re": (0.9366, 0.9903), "la": (0.8399, 0.9785), "tpe": (0.9526, 0.9988)}
    worst = 0.0
    for name, (b_ref, p_ref) in table.items():
        pre = PRESETS[name]
        b, p = brightness_purity(pre.populations)
        back = populations_from_correlations(pre.brightness_tilde, pre.P2, pre.P3, pre.name)
        worst = max(worst, abs(b - b_ref), abs(p - p_ref),
                    abs(back.p1 - pre.populations.p1), abs(back.p2 - pre.populations.p2))
    return worst <= 5e-4, f"max deviation {worst:.2e}"


def _check_entropy() -> Tuple[bool, str]:
    h = binary_entropy(0.02)
    return abs(h - 0.141441) < 1e-5, f"H2(0.02) = {h:.6f}"


def _check_l_prime() -> Tuple[bool, str]:
    lp, s = l_prime(2e-5)
    return abs(lp - 0.4954) < 5e-4 and abs(s - 0.0263) < 2e-3, f"L' = {lp:.5f} at s = {s:.4f}"


def _check_key_rate() -> Tuple[bool, str]:
    ch = ChannelParams()
    r = key_rate_bb84(PdsModel(0.5), ch, 0.0, decoy="infinite")
    q1 = (ch.Y0 + (1 - ch.Y0)) * 0.5 * exp(-0.5)
    e1 = (ch.e0 * ch.Y0 + ch.e_d) / (ch.Y0 + (1 - ch.Y0))
    return abs(r.Q1 - q1) < 1e-12 and abs(r.e1 - e1) < 1e-12, f"Q1 = {r.Q1:.6f}, e1 = {r.e1:.6f}"


def _check_discrimination() -> Tuple[bool, str]:
    zero = projector([1, 0])
    plus = projector(np.array([1, 1]) / np.sqrt(2))
    hel = helstrom(zero, plus)
    usd = usd_probability(zero, plus)
    ok = abs(hel - (0.5 + np.sqrt(2) / 4)) < 1e-9 and abs(usd - (1 - 1 / np.sqrt(2))) < 1e-6
    return ok, f"Helstrom = {hel:.9f}, USD = {usd:.7f}"


SELFTESTS = (
    ("presets round trip", _check_presets),
    ("binary entropy", _check_entropy),
    ("L' maximization", _check_l_prime),
    ("decoy single-photon terms", _check_key_rate),
    ("Helstrom and USD oracles", _check_discrimination),
)


def selftest(out: Optional[IO] = None) -> bool:
    """Run the consistency checks, one line each; True when all pass."""
    out = out or sys.stdout
    ok_all = True
    for name, fn in SELFTESTS:
        try:
            ok, detail = fn()
        except QdCryptError as e:
            ok, detail = False, str(e)
        ok_all = ok_all and ok
        out.write(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}\n")
    return ok_all


def _common(p: argparse.ArgumentParser):
    p.add_argument("--source", help="re, la, tpe (optionally -coherent/-incoherent), pds, pds-fixed, "
                                    "pds-best or custom")
    p.add_argument("--eta", type=float, help="quantum-dot collection efficiency")
    p.add_argument("--mu", type=float, help="Poisson mean photon number")
    p.add_argument("--distance", type=float, help="fiber length in km")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "MIN", "MAX", "STEPS"), help="sweep one variable")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--workers", type=int, help="worker processes for sweeps")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="any configuration key, may repeat")
    p.add_argument("--json", action="store_true", help="print JSON instead of CSV on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdcrypt", description="Benchmark quantum-cryptographic primitives "
                                                                 "under quantum-dot and Poisson sources.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {qdcryptpy.version}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)
    for prim in PRIMITIVES:
        _common(sub.add_parser(prim, help=f"evaluate {prim}"))
    fig = sub.add_parser("figures", help="write the comparison curves as CSV files")
    fig.add_argument("ids", nargs="+", help=f"figure ids or 'all': {', '.join(FIGURES)}")
    fig.add_argument("--out", default="figures", help="output directory")
    fig.add_argument("--workers", type=int, default=1)
    chk = sub.add_parser("check", help="compare the model with published benchmark values")
    chk.add_argument("ids", nargs="+", help=f"check ids or 'all': {', '.join(REPORTS)}")
    chk.add_argument("--out", default="checks", help="output directory")
    chk.add_argument("--workers", type=int, default=1)
    sub.add_parser("selftest", help="run the quick consistency checks")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    cli: Dict[str, object] = {"primitive": args.command}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cli[k.strip()] = v.strip()
    for k in ("source", "eta", "mu", "distance", "out", "workers"):
        v = getattr(args, k)
        if v is not None:
            cli[k] = v
    if args.sweep is not None:
        cli["sweep"] = " ".join(args.sweep)
    return RunConfig.from_layers(file_values, cli)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "selftest":
            return 0 if selftest() else 1
        if args.command == "figures":
            if args.workers < 1:
                raise ConfigError(f"workers must be >= 1, got {args.workers}")
            for p in figures(args.ids, args.out, args.workers):
                print(p)
            return 0
        if args.command == "check":
            if args.workers < 1:
                raise ConfigError(f"workers must be >= 1, got {args.workers}")
            paths, ok = check(args.ids, args.out, args.workers)
            for p in paths:
                print(p)
            return 0 if ok else 1
        config = config_from_args(args)
        result = run(config)
        if not config.out:
            if args.json:
                result.print_as_json(sys.stdout)
                sys.stdout.write("\n")
            else:
                sys.stdout.write(result.to_csv())
        return 0
    except QdCryptError as e:
        print(f"qdcrypt: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
