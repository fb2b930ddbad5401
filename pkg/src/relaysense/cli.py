"""Command-line front end: stock figures, MC validation, and one-off queries.

Every figure writes a CSV with a header row, one row per swept point, and
both the closed-form and simulated values (the latter with standard
errors), formatted to nine significant digits so reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import sys

from . import energy_opt, harvest, mcsim, sensing, transmission
from .scenario import (ConfigError, Scenario, apply_overrides, ladder_conf,
                       load_config, preset, relay_ladder_conf, scenario_from_conf)

FIGURES = ("fig3", "fig4", "fig6", "fig7", "fig8", "table1")
Z_LIMIT = 4.0


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "%.9g" % v
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _base_conf(args, figure_name=None):
    if figure_name is not None:
        conf = preset(figure_name)
        if args.config:
            for section, entries in load_config(args.config).items():
                conf.setdefault(section, {}).update(entries)
    elif args.config:
        conf = load_config(args.config)
    else:
        conf = preset("default")
    conf = apply_overrides(conf, args.set)
    sim = conf.setdefault("sim", {})
    if args.seed is not None:
        sim["seed"] = str(args.seed)
    if args.trials is not None:
        sim["trials"] = str(args.trials)
    if args.workers is not None:
        sim["workers"] = str(args.workers)
    return conf


def _scenario(args, figure_name=None) -> Scenario:
    return scenario_from_conf(_base_conf(args, figure_name))


def _analytic_detection(scn: Scenario, n_samples=None):
    return sensing.detection_probability(
        scn.policy.threshold, n_samples if n_samples is not None else scn.n_samples,
        scn.links, scn.primary, scn.policy)


# --- figure runners ---------------------------------------------------------

def _run_fig3(conf, no_mc):
    header = ["d_pu_first_km", "n_primary", "p_detect_analytic", "p_detect_mc", "stderr"]
    rows = []
    for n_pu in (1, 2, 3):
        for k in range(15):
            d = round(0.1 * (k + 1), 10)
            scn = scenario_from_conf(ladder_conf(conf, d, n_pu))
            pd = _analytic_detection(scn)
            if no_mc:
                rows.append([d, n_pu, pd, None, None])
            else:
                est = mcsim.mc_detection(scn.links, scn.primary, scn.policy,
                                         scn.policy.threshold, scn.n_samples,
                                         scn.trials, scn.seed, workers=scn.workers)
                rows.append([d, n_pu, pd, est.mean, est.stderr])
    return header, rows


def _run_fig4(conf, no_mc):
    header = ["p_max_db", "rho", "p_out_analytic", "p_out_mc", "stderr"]
    rows = []
    for rho in (0.5, 0.9, 1.0):
        for db in range(0, 31, 2):
            c = apply_overrides(conf, ["policy.p_max=%d dB" % db, "csi.rho=%g" % rho])
            scn = scenario_from_conf(c)
            pd = _analytic_detection(scn)
            p_out = transmission.outage_probability(
                scn.gamma_th, scn.links, scn.primary, scn.policy, pd, rho)
            if no_mc:
                rows.append([db, rho, p_out, None, None])
            else:
                est = mcsim.mc_outage(scn.links, scn.primary, scn.policy,
                                      scn.gamma_th, pd, rho, scn.trials, scn.seed,
                                      workers=scn.workers)
                rows.append([db, rho, p_out, est.mean, est.stderr])
    return header, rows


def _run_fig6(conf, no_mc):
    header = ["d_pu_first_km", "n_primary", "energy_analytic_j", "energy_mc_j", "stderr"]
    rows = []
    for n_pu in (1, 3):
        for k in range(10):
            d = round(0.1 * (k + 1), 10)
            scn = scenario_from_conf(ladder_conf(conf, d, n_pu))
            model = scn.energy_model()
            e = energy_opt.total_energy(model, scn.relay, scn.t_sense)
            if no_mc:
                rows.append([d, n_pu, e, None, None])
            else:
                est = mcsim.mc_frame_energy(model, scn.relay, scn.t_sense,
                                            scn.trials, scn.seed, workers=scn.workers)
                rows.append([d, n_pu, e, est.mean, est.stderr])
    return header, rows


def _run_fig7(conf, no_mc):
    header = ["t_sense_s", "energy_harv_analytic_j", "energy_harv_mc_j", "stderr_harv",
              "energy_noharv_analytic_j", "energy_noharv_mc_j", "stderr_noharv"]
    rows = []
    scn0 = scenario_from_conf(conf)
    model = scn0.energy_model()
    for k in range(19):
        t_s = round(0.005 * (k + 1), 10)
        eh = energy_opt.total_energy(model, scn0.relay, t_s)
        en = energy_opt.total_energy_nonharvesting(model, scn0.relay, t_s)
        if no_mc:
            rows.append([t_s, eh, None, None, en, None, None])
        else:
            est_h = mcsim.mc_frame_energy(model, scn0.relay, t_s, scn0.trials,
                                          scn0.seed, workers=scn0.workers)
            est_n = mcsim.mc_frame_energy(model, scn0.relay, t_s, scn0.trials,
                                          scn0.seed, workers=scn0.workers,
                                          harvesting=False)
            rows.append([t_s, eh, est_h.mean, est_h.stderr,
                         en, est_n.mean, est_n.stderr])
    return header, rows


def _run_fig8(conf, no_mc):
    header = ["t_sense_s", "n_primary", "ecg_analytic", "ecg_mc", "stderr"]
    rows = []
    for n_pu in (1, 2):
        scn = scenario_from_conf(ladder_conf(conf, 0.5, n_pu))
        model = scn.energy_model()
        for k in range(19):
            t_s = round(0.005 * (k + 1), 10)
            val = energy_opt.ecg(model, scn.relay, t_s)
            if no_mc:
                rows.append([t_s, n_pu, val, None, None])
            else:
                est = mcsim.mc_ecg(model, scn.relay, t_s, scn.trials, scn.seed,
                                   workers=scn.workers)
                rows.append([t_s, n_pu, val, est.mean, est.stderr])
    return header, rows


def _run_table1(conf, no_mc):
    header = ["n_relays", "n_primary", "t_sense_star_s", "multiplier",
              "energy_j", "data_bits", "constraint_active"]
    rows = []
    for n_relays in (1, 2, 3, 4):
        for n_pu in (1, 2, 3, 4):
            c = relay_ladder_conf(ladder_conf(conf, 1.0, n_pu, 0.01),
                                  0.5, 0.5, n_relays, 0.005)
            scn = scenario_from_conf(c)
            model = scn.energy_model()
            opt = energy_opt.optimize_sensing_time(model, scn.relay, scn.d_star)
            rows.append([n_relays, n_pu, opt.t_sense, opt.multiplier, opt.energy,
                         opt.data, opt.constraint_active])
    return header, rows


_RUNNERS = {
    "fig3": _run_fig3,
    "fig4": _run_fig4,
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "table1": _run_table1,
}


def cmd_figure(args):
    conf = _base_conf(args, args.name)
    header, rows = _RUNNERS[args.name](conf, args.no_mc)
    out = args.out or ("%s.csv" % args.name)
    write_csv(out, header, rows)
    print("wrote %s (%d rows)" % (out, len(rows)))
    return 0


# --- validation --------------------------------------------------------------

def _validate_pairs(scn: Scenario):
    """Yield (name, analytic, MCEstimate) pairs across every simulator."""
    pairs = []
    lam0 = scn.policy.threshold
    for off, (fac, tag) in enumerate(((0.5, "lo"), (1.0, "mid"), (2.0, "hi"))):
        lam = lam0 * fac
        pd = sensing.detection_probability(lam, scn.n_samples, scn.links,
                                           scn.primary, scn.policy)
        est = mcsim.mc_detection(scn.links, scn.primary, scn.policy, lam,
                                 scn.n_samples, scn.trials, scn.seed + off,
                                 workers=scn.workers)
        pairs.append(("detection_%s" % tag, pd, est))

    pd0 = _analytic_detection(scn)
    rho = scn.rho
    p_out = transmission.outage_probability(scn.gamma_th, scn.links, scn.primary,
                                            scn.policy, pd0, rho)
    pairs.append(("outage", p_out,
                  mcsim.mc_outage(scn.links, scn.primary, scn.policy, scn.gamma_th,
                                  pd0, rho, scn.trials, scn.seed, workers=scn.workers)))

    rep = harvest.avg_harvested_power(scn.links, scn.primary, scn.policy,
                                      scn.relay, pd0)
    pairs.append(("harvest", rep.usable_power,
                  mcsim.mc_harvest(scn.links, scn.primary, scn.policy, scn.relay,
                                   pd0, scn.trials, scn.seed, workers=scn.workers)))

    model = scn.energy_model()
    e_h = energy_opt.total_energy(model, scn.relay, scn.t_sense)
    pairs.append(("frame_energy", e_h,
                  mcsim.mc_frame_energy(model, scn.relay, scn.t_sense, scn.trials,
                                        scn.seed, workers=scn.workers)))
    e_n = energy_opt.total_energy_nonharvesting(model, scn.relay, scn.t_sense)
    pairs.append(("frame_energy_noharv", e_n,
                  mcsim.mc_frame_energy(model, scn.relay, scn.t_sense, scn.trials,
                                        scn.seed, workers=scn.workers, harvesting=False)))

    u0 = model.report.u_report[scn.relay]
    k_clip, thr = sensing.solve_saturation_gain(scn.links, scn.primary, scn.policy,
                                                scn.relay, u=u0)
    pairs.append(("clipped_gain", 1.0 / u0,
                  mcsim.mc_clipped_gain(scn.links, scn.primary, scn.policy, scn.relay,
                                        thr, u0, scn.trials, scn.seed,
                                        workers=scn.workers)))
    return pairs


def cmd_validate(args):
    scn = _scenario(args)
    pairs = _validate_pairs(scn)
    rows = []
    worst = 0.0
    for name, ana, est in pairs:
        z = est.z_score(ana)
        worst = max(worst, abs(z))
        status = "pass" if abs(z) <= Z_LIMIT else "FAIL"
        rows.append([name, ana, est.mean, est.stderr, z, status])
        print("%-22s analytic=%-14.6g mc=%-14.6g se=%-10.3g z=%+7.2f  %s"
              % (name, ana, est.mean, est.stderr, z, status))
    if args.out:
        write_csv(args.out, ["check", "analytic", "mc", "stderr", "z", "status"], rows)
    if worst > Z_LIMIT:
        print("validation FAILED (worst |z| = %.2f > %.1f)" % (worst, Z_LIMIT))
        return 1
    print("validation passed (worst |z| = %.2f)" % worst)
    return 0


# --- single-quantity commands -------------------------------------------------

def cmd_detect(args):
    scn = _scenario(args)
    pd = _analytic_detection(scn)
    print("p_detect_analytic = %.9g  (samples=%d, threshold=%.6g W)"
          % (pd, scn.n_samples, scn.policy.threshold))
    if not args.no_mc:
        est = mcsim.mc_detection(scn.links, scn.primary, scn.policy,
                                 scn.policy.threshold, scn.n_samples, scn.trials,
                                 scn.seed, workers=scn.workers)
        print("p_detect_mc       = %.9g +/- %.3g  (z=%+.2f)"
              % (est.mean, est.stderr, est.z_score(pd)))
    return 0


def cmd_outage(args):
    scn = _scenario(args)
    pd = _analytic_detection(scn)
    p_out = transmission.outage_probability(scn.gamma_th, scn.links, scn.primary,
                                            scn.policy, pd, scn.rho)
    print("p_outage_analytic = %.9g  (rho=%.4g, gamma_th=%.6g W)"
          % (p_out, scn.rho, scn.gamma_th))
    if not args.no_mc:
        est = mcsim.mc_outage(scn.links, scn.primary, scn.policy, scn.gamma_th,
                              pd, scn.rho, scn.trials, scn.seed, workers=scn.workers)
        print("p_outage_mc       = %.9g +/- %.3g  (z=%+.2f)"
              % (est.mean, est.stderr, est.z_score(p_out)))
    return 0


def cmd_harvest(args):
    scn = _scenario(args)
    pd = _analytic_detection(scn)
    rep = harvest.avg_harvested_power(scn.links, scn.primary, scn.policy,
                                      scn.relay, pd)
    print("harvest_mean_w   = %.9g" % rep.mean_power)
    print("harvest_usable_w = %.9g  (p_detect=%.6g)" % (rep.usable_power, pd))
    if not args.no_mc:
        est = mcsim.mc_harvest(scn.links, scn.primary, scn.policy, scn.relay, pd,
                               scn.trials, scn.seed, workers=scn.workers)
        print("harvest_mc_w     = %.9g +/- %.3g  (z=%+.2f)"
              % (est.mean, est.stderr, est.z_score(rep.usable_power)))
    return 0


def cmd_energy(args):
    scn = _scenario(args)
    model = scn.energy_model()
    bd = energy_opt.energy_breakdown(model, scn.t_sense, d_star=scn.d_star)
    print("t_sense = %.6g s, p_detect = %.9g" % (scn.t_sense, model.p_detect(scn.t_sense)))
    print("%-6s %-14s %-14s %-14s %-12s" % ("relay", "E_total_J", "E_noharv_J", "ECG", "data_bits"))
    for i in range(model.n_relays):
        print("%-6d %-14.6g %-14.6g %-14.6g %-12.6g"
              % (i, bd.e_total[i], bd.e_total_nonharvesting[i], bd.ecg[i], bd.data[i]))
    if not args.no_mc:
        est = mcsim.mc_frame_energy(model, scn.relay, scn.t_sense, scn.trials,
                                    scn.seed, workers=scn.workers)
        ref = bd.e_total[scn.relay]
        print("relay %d mc: E_total = %.9g +/- %.3g (z=%+.2f)"
              % (scn.relay, est.mean, est.stderr, est.z_score(ref)))
    return 0


def cmd_optimize(args):
    scn = _scenario(args)
    model = scn.energy_model()
    try:
        opt = energy_opt.optimize_sensing_time(model, scn.relay, scn.d_star)
    except energy_opt.InfeasibleDataError as exc:
        print("infeasible: %s" % exc)
        return 1
    ok = energy_opt.necessary_condition(model, scn.relay, opt.t_sense)
    print("t_sense_star = %.9g s" % opt.t_sense)
    print("multiplier   = %.9g" % opt.multiplier)
    print("energy_min   = %.9g J" % opt.energy)
    print("data         = %.9g bits/frame (floor %.9g)" % (opt.data, scn.d_star))
    print("constraint   = %s" % ("active" if opt.constraint_active else "slack"))
    print("slope_check  = %s" % ("satisfied" if ok else "violated"))
    return 0


# --- entry point ---------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="relaysense",
        description="Closed-form and Monte Carlo engine for energy-harvesting "
                    "cooperative spectrum sensing")
    p.add_argument("--config", help="INI scenario file")
    p.add_argument("--seed", type=int, help="simulation seed override")
    p.add_argument("--trials", type=int, help="simulation trials override")
    p.add_argument("--workers", type=int, help="simulation worker threads")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo columns")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                   help="override one scenario value (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)
    fig = sub.add_parser("figure", help="regenerate a stock figure CSV")
    fig.add_argument("name", choices=FIGURES)
    fig.set_defaults(func=cmd_figure)
    sub.add_parser("validate", help="run every analytic/MC pair").set_defaults(func=cmd_validate)
    sub.add_parser("optimize", help="optimise the sensing time").set_defaults(func=cmd_optimize)
    sub.add_parser("detect", help="detection probability").set_defaults(func=cmd_detect)
    sub.add_parser("outage", help="outage probability").set_defaults(func=cmd_outage)
    sub.add_parser("harvest", help="harvested power").set_defaults(func=cmd_harvest)
    sub.add_parser("energy", help="frame energy breakdown").set_defaults(func=cmd_energy)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
