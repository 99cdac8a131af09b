"""Command-line front end.

    isacsim run --config cfg.toml --drops 500 --seed 1 --out results/
    isacsim validate --config cfg.toml
    isacsim tables

Exit codes: 0 success, 2 config error, 3 placement infeasible, 4 I/O error.
Set ISACSIM_LOG=debug for stage-by-stage logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import config as config_mod
from .background import UMI_TRP_MRP, UMI_UT_MRP
from .campaign import CampaignSpec, drop_seed_for, run_campaign, simulate_drop
from .errors import ConfigError, IsacSimError, PlacementInfeasible
from .large_scale import BUILTIN_CURVES
from .rcs import K1_K2, UAV_LARGE_FACES, XPR_STATS

logger = logging.getLogger("isacsim")


def _setup_logging(verbose: bool) -> None:
    level_name = os.environ.get("ISACSIM_LOG", "debug" if verbose else "info")
    level = getattr(logging, level_name.upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _resolve_mode(cfg, flag: str | None) -> str | None:
    if flag is None:
        return None
    family = "UT" if cfg.scenario.sensing_mode.startswith("UT") else "TRP"
    if flag == "monostatic":
        return f"{family}-monostatic"
    return "UT-UT" if family == "UT" else "TRP-TRP"


def _cmd_run(args) -> int:
    cfg = config_mod.load(args.config)
    spec = CampaignSpec(
        config=cfg,
        n_drops=args.drops if args.drops is not None else cfg.drops,
        seed=args.seed if args.seed is not None else cfg.seed,
        metrics=tuple(args.metrics.split(",")) if args.metrics else cfg.metrics,
        out_dir=args.out if args.out is not None else cfg.out_dir,
        workers=args.workers if args.workers is not None else cfg.workers,
        mode=_resolve_mode(cfg, args.mode),
    )
    results = run_campaign(spec)
    from .report import emit_campaign_artifacts

    tag = (spec.mode or cfg.scenario.sensing_mode).lower().replace("-", "_")
    written = emit_campaign_artifacts(results, spec.out_dir, tag)
    if args.export_cir or cfg.export_cir:
        written += _export_first_drop_cir(cfg, spec, tag)
    for res in results:
        if len(res.samples) == 0:
            print(f"{res.metric}: no samples")
            continue
        q = res.percentiles
        print(
            f"{res.metric}: n={len(res.samples)} p05={q[4]:.2f} p50={q[49]:.2f} p95={q[94]:.2f}"
            + (f" ({res.n_infeasible} infeasible drops)" if res.n_infeasible else "")
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def _export_first_drop_cir(cfg, spec: CampaignSpec, tag: str) -> list[str]:
    from .synthesis import write_cir_binary, write_cir_csv

    links, _ = simulate_drop(
        cfg, drop_seed_for(spec.seed, 0), mode=spec.mode, best_pairs=spec.best_pairs,
        keep_paths=True, build_cir=True,
    )
    written = []
    os.makedirs(spec.out_dir, exist_ok=True)
    for res in links:
        base = os.path.join(spec.out_dir, f"{tag}_cir_{res.link.link_id}")
        with open(base + ".csv", "w", newline="") as fh:
            write_cir_csv(res.cir, fh)
        with open(base + ".bin", "wb") as fh:
            write_cir_binary(res.cir, fh)
        written += [base + ".csv", base + ".bin"]
    return written


def _cmd_validate(args) -> int:
    config_mod.load(args.config)
    print(f"{args.config}: OK")
    return 0


def _print_table(title: str, provenance: str, headers: list[str], rows: list[list]) -> None:
    print(f"\n{title}  [{provenance}]")
    widths = [max(len(str(h)), max((len(str(r[i])) for r in rows), default=0)) for i, h in enumerate(headers)]
    print("  " + "  ".join(str(h).ljust(w) for h, w in zip(headers, widths)))
    for r in rows:
        print("  " + "  ".join(str(v).ljust(w) for v, w in zip(r, widths)))


def _cmd_tables(_args) -> int:
    rel19 = "3GPP TR 38.901 Rel-19 ISAC agreements"
    _print_table(
        "Angle-independent RCS", rel19,
        ["target", "10lg(sigma_M) [dBsm]", "sigma_S std [dB]"],
        [["uav_small", -12.81, 3.74], ["human_m1", -1.37, 3.94]],
    )
    _print_table(
        "Large-UAV face pattern (reference for other angle-dependent targets)", rel19,
        ["face", "phi_c", "phi_3dB", "theta_c", "theta_3dB", "G_max", "sigma_max", "theta range", "phi range"],
        [
            [f.face_id, "-" if f.phi_center is None else f.phi_center,
             "-" if f.phi_3db is None else f.phi_3db, f.theta_center, f.theta_3db,
             f.g_max_dbsm, f.sigma_max_db, list(f.theta_range), list(f.phi_range)]
            for f in UAV_LARGE_FACES
        ],
    )
    _print_table(
        "Bistatic correction coefficients", rel19,
        ["target", "k1", "k2"],
        [[t, k1, k2] for t, (k1, k2) in K1_K2.items()],
    )
    _print_table(
        "Cross-polarization ratio statistics", rel19,
        ["target", "mu_XPR [dB]", "sigma_XPR [dB]"],
        [[t, mu, sg] for t, (mu, sg) in XPR_STATS.items()],
    )
    _print_table(
        "Monostatic background reference points (urban micro; shifted Gamma, rate form)", rel19,
        ["row", "alpha_d", "beta_d", "c_d", "alpha_h", "beta_h", "c_h"],
        [
            ["TRP", UMI_TRP_MRP.alpha_d, UMI_TRP_MRP.beta_d, UMI_TRP_MRP.c_d,
             UMI_TRP_MRP.alpha_h, UMI_TRP_MRP.beta_h, UMI_TRP_MRP.c_h],
            ["UT", UMI_UT_MRP.alpha_d, UMI_UT_MRP.beta_d, UMI_UT_MRP.c_d,
             UMI_UT_MRP.alpha_h, UMI_UT_MRP.beta_h, UMI_UT_MRP.c_h],
            ["aerial", "0.0156h+5.5399", "40.4517/(h+254.6318)", "0.0140h+15.1184",
             "0.0123h+11.9569", "17.8047/(h-0.2202)", "0.0532h-0.0120"],
        ],
    )
    _print_table(
        "Built-in path-loss curves PL = a lg(d_m) + b + c lg(f_GHz)", "reference curves",
        ["name", "a", "b", "c"],
        [[c.name, "exact 20lg(4 pi d f / c)" if c.exact_free_space else c.a,
          "" if c.exact_free_space else c.b, "" if c.exact_free_space else c.c]
         for c in BUILTIN_CURVES.values()],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isacsim", description="Sensing/communication channel simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a drop campaign and emit CDF artifacts")
    run.add_argument("--config", required=True)
    run.add_argument("--drops", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--metrics", default=None, help="comma list: coupling_loss,ds,asa,asd,zsa,zsd")
    run.add_argument("--mode", choices=["monostatic", "bistatic"], default=None)
    run.add_argument("--export-cir", action="store_true", help="write first-drop CIR exports")
    run.add_argument("--verbose", action="store_true")
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="parse and validate a config file")
    val.add_argument("--config", required=True)
    val.add_argument("--verbose", action="store_true")
    val.set_defaults(func=_cmd_validate)

    tab = sub.add_parser("tables", help="print the embedded parameter tables")
    tab.add_argument("--verbose", action="store_true")
    tab.set_defaults(func=_cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(getattr(args, "verbose", False))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PlacementInfeasible as exc:
        print(f"placement infeasible: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except IsacSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
