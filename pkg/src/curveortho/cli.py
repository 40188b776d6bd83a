"""Batch driver: experiment configs in, CSV/JSON/SVG artifacts out.

A config couples one curve with one weight and schedules tasks over a
degree sweep.  All numerics are deterministic: node counts are fixed by
the config, probe grids are seeded, and worker parallelism only spans
independent degrees, so byte-identical output is produced for any
``--jobs`` setting.

Exit codes: 0 success, 1 configuration error, 2 numerical contract
violation (contraction, conditioning, resolution), 3 threshold failure in
``--check`` mode.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics as asym
from . import oracle as orc
from . import zeros as zr
from .curves import CurveSpec, fit_interior_map
from .errors import ConfigError, CurveOrthoError, NumericalError
from .szego import build_szego_pack, weight_from_dict
from .transforms import ExpansionConfig, expand_thm1, expand_thm2

__all__ = ["main", "run", "load_config"]

_KNOWN_TASKS = ("expand", "oracle", "compare", "asymptotics", "thm3", "zeros",
                "proposition")


def _cplx(pair):
    return complex(pair[0], pair[1])


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return validate_config(raw)


def validate_config(raw):
    cfg = dict(raw)
    try:
        cdict = cfg["curve"]
        curve = CurveSpec(
            c1=float(cdict["c1"]),
            c0=_cplx(cdict.get("c0", [0.0, 0.0])),
            cneg=np.array([_cplx(p) for p in cdict.get("cneg", [])], dtype=complex),
            rho_hat=cdict.get("rho_hat"),
        )
        weight = weight_from_dict(cfg["weight"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad curve/weight block: {exc}") from exc
    degrees = cfg.get("degrees", [])
    if isinstance(degrees, dict):
        degrees = list(range(int(degrees["start"]), int(degrees["stop"]) + 1))
    degrees = [int(n) for n in degrees]
    if not degrees:
        raise ConfigError("degrees must be nonempty")
    tasks = cfg.get("tasks", ["expand", "oracle", "compare"])
    for t in tasks:
        if t not in _KNOWN_TASKS:
            raise ConfigError(f"unknown task {t!r} (known: {', '.join(_KNOWN_TASKS)})")
    if "thm3" in tasks and weight.kind != "singular":
        raise ConfigError("task 'thm3' requires a singular weight")
    exp = cfg.get("expansion", {})
    expansion = ExpansionConfig(
        r=exp.get("r"), N=int(exp.get("N", 512)), tol=float(exp.get("tol", 1e-12)),
        k_max=int(exp.get("k_max", 500)),
        adapt_nodes=bool(exp.get("adapt_nodes", False)))
    return {
        "raw": cfg, "curve": curve, "weight": weight, "degrees": degrees,
        "tasks": list(tasks), "expansion": expansion,
        "imap_cfg": cfg.get("interior_map", {}),
        "oracle_N": int(cfg.get("oracle", {}).get("N", 0)) or None,
        "targets": cfg.get("targets", "L_1"),
        "proposition": cfg.get("proposition", {}),
        "asym_cfg": cfg.get("asymptotics", {}),
        "output_dir": cfg.get("output_dir", "curveortho_out"),
    }


def _named_targets(name, curve, pack, r):
    if isinstance(name, (list, tuple)):
        return np.array([_cplx(p) for p in name], dtype=complex)
    rng_angles = (np.arange(64) + 0.31) / 64 * 2 * np.pi
    if name == "L_1":
        return curve.psi(np.exp(1j * rng_angles))
    if name == "annulus":
        s_out = 0.5 * (1.0 + 1.0 / r)
        s_in = 0.5 * (max(pack.rho, curve.rho_hat) + r)
        ang = rng_angles[:32]
        return np.concatenate([curve.psi(s_out * np.exp(1j * ang)),
                               curve.psi(s_in * np.exp(1j * ang))])
    if name == "interior_grid":
        lo = curve.rho_hat
        radii = lo + (r - lo) * np.array([0.3, 0.6, 0.85])
        ang = rng_angles[:16]
        return curve.psi((radii[:, None] * np.exp(1j * ang)[None, :]).ravel())
    raise ConfigError(f"unknown target set {name!r}")


def _fmt(x):
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class _Session:
    """Shared constructions for one config run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.curve = cfg["curve"]
        self.weight = cfg["weight"]
        imc = cfg["imap_cfg"]
        z0 = _cplx(imc["z0"]) if "z0" in imc else None
        self.imap = fit_interior_map(self.curve, z0=z0,
                                     degree=int(imc.get("degree", 64)))
        self.pack = build_szego_pack(self.curve, self.imap, self.weight)
        self.expansion = cfg["expansion"]
        self.r = self.expansion.resolve_r(self.pack)
        self.targets = _named_targets(cfg["targets"], self.curve, self.pack, self.r)
        self.oracle_N = cfg["oracle_N"]
        self.sdata = None
        if self.weight.kind == "singular":
            self.sdata = asym.alpha_constants(self.curve, self.pack)

    def oracle_poly(self, n):
        return orc.monic_orthogonal(self.curve, self.weight, n, N=self.oracle_N)


def _task_expand(s: _Session, degrees, jobs, verbose):
    def one(n):
        r1 = expand_thm1(s.curve, s.imap, s.pack, s.expansion, n, s.targets)
        r2 = expand_thm2(s.curve, s.imap, s.pack, s.expansion, n, s.targets)
        return n, r1, r2

    results = _parallel_map(one, degrees, jobs)
    records = []
    for n, r1, r2 in results:
        if verbose:
            print(f"[expand] n={n} terms={r1.terms_used} "
                  f"bound_residual={r1.bound_residual:.3e} q={r1.q:.3e}")
        records.append({
            "n": n, "gamma_n": r1.gamma_n, "gamma_n_g_route": r2.gamma_n,
            "terms_used": r1.terms_used, "bound_residual": r1.bound_residual,
            "bounds_ok": bool(r1.bounds_ok and r2.bounds_ok),
            "targets": [{"z": [float(z.real), float(z.imag)],
                         "Pn_re": float(v.real), "Pn_im": float(v.imag),
                         "branch": b}
                        for z, v, b in zip(r1.targets, r1.values, r1.branches)],
        })
    gamma_rel = [abs(rec["gamma_n"] - rec["gamma_n_g_route"])
                 / max(abs(rec["gamma_n"]), 1e-300) for rec in records]
    checks = {"gamma_f_vs_g_max_rel": max(gamma_rel),
              "bounds_ok": all(rec["bounds_ok"] for rec in records)}
    return {"records": records}, checks, {(n): (r1, r2) for n, r1, r2 in results}


def _parallel_map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def run(cfg, out_dir=None, check=False, jobs=1, svg=False, verbose=False):
    """Execute the configured tasks; returns (exit_code, summary dict)."""
    s = _Session(cfg)
    out = Path(out_dir or cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    degrees = cfg["degrees"]
    summary = {"config": cfg["raw"], "resolved_r": s.r,
               "rho": s.pack.rho, "rho_hat": s.curve.rho_hat,
               "artifacts": [], "checks": {}}
    expansions = None

    def _emit(name, payload):
        p = out / name
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        summary["artifacts"].append(name)

    if "expand" in cfg["tasks"]:
        payload, checks, expansions = _task_expand(s, degrees, jobs, verbose)
        _emit("expand.json", payload)
        summary["checks"]["expand"] = checks

    oracle_polys = {}
    if {"oracle", "compare", "asymptotics", "thm3", "zeros"} & set(cfg["tasks"]):
        need = set(degrees)
        oracle_polys = dict(_parallel_map(
            lambda n: (n, s.oracle_poly(n)), sorted(need), jobs))
    if "oracle" in cfg["tasks"]:
        _emit("oracle.json", {"polys": [oracle_polys[n].as_dict() for n in degrees]})

    if "compare" in cfg["tasks"]:
        if expansions is None:
            _, _, expansions = _task_expand(s, degrees, jobs, verbose)
        rows, maxrel, gmax = [], 0.0, 0.0
        for n in degrees:
            r1, r2 = expansions[n]
            pn = oracle_polys[n]
            ov = pn.eval(s.targets)
            scale = float(np.abs(ov).max())
            d1 = float(np.abs(r1.values - ov).max()) / scale
            d2 = float(np.abs(r2.values - ov).max()) / scale
            g_err = max(abs(r1.gamma_n - pn.gamma), abs(r2.gamma_n - pn.gamma),
                        abs(r1.gamma_n - r2.gamma_n)) / pn.gamma
            maxrel = max(maxrel, d1, d2)
            gmax = max(gmax, g_err)
            rows.append((n, d1, d2, g_err))
        _write_csv(out / "compare.csv",
                   ["n", "thm1_rel_err", "thm2_rel_err", "gamma_rel_err"], rows)
        summary["artifacts"].append("compare.csv")
        summary["checks"]["compare"] = {
            "max_rel_err": maxrel, "max_gamma_rel_err": gmax,
            "pass": maxrel <= 1e-7 and gmax <= 1e-7}

    if "asymptotics" in cfg["tasks"]:
        r1_list = cfg["asym_cfg"].get("r1", [1.2, 1.5])
        ang = (np.arange(16) + 0.37) / 16 * 2 * np.pi
        rows = []
        for r1v in r1_list:
            zt = s.curve.psi(r1v * np.exp(1j * ang))
            for n in degrees:
                pn = oracle_polys[n]
                main = asym.szego_exterior_formula(s.curve, s.pack, n, zt, r1=r1v * 0.98)
                ov = pn.eval(zt) * pn.gamma
                mv = main * asym.gamma_asymptotic(s.curve, s.pack, n)
                val = complex(mv[np.argmax(np.abs(ov - mv))])
                orc_v = complex(ov[np.argmax(np.abs(ov - mv))])
                abs_err = float(np.abs(ov - mv).max())
                rel = abs_err / float(np.abs(ov).max())
                rows.append((n, val.real, val.imag, orc_v.real, orc_v.imag,
                             abs_err, rel, (s.pack.rho / r1v) ** n))
        _write_csv(out / "asymptotics.csv",
                   ["n", "value_re", "value_im", "oracle_re", "oracle_im",
                    "abs_err", "rel_err", "modeled_rate"], rows)
        summary["artifacts"].append("asymptotics.csv")

    if "thm3" in cfg["tasks"]:
        pts = cfg["raw"].get("thm3_points")
        if pts:
            zpts = np.array([_cplx(p) for p in pts])
        else:
            # two radii (inside G_sigma and in the annulus band), angles away
            # from every branch cut
            th1 = s.pack.thetas[0]
            radii = [0.5 * (s.pack.sigma + s.curve.rho_hat),
                     0.5 * (s.pack.rho + 1.0)]
            wpts = np.array([rr * np.exp(1j * (th1 + ang))
                             for rr in radii for ang in (2.0, 4.2)])
            zpts = s.curve.psi(wpts)
        rows = []
        for n in degrees:
            pn = oracle_polys[n]
            vals, _ = asym.thm3_interior(s.curve, s.imap, s.pack, s.sdata, n, zpts)
            ov = pn.eval(zpts)
            denom = abs(asym.binom_general(n, s.sdata.lambdas[0] - 1.0)) * s.pack.rho ** n
            for z, v, o in zip(zpts, vals, ov):
                rows.append((n, z.real, z.imag, v.real, v.imag, o.real, o.imag,
                             float(abs(v - o)), float(abs(v - o) / denom)))
        _write_csv(out / "thm3.csv",
                   ["n", "z_re", "z_im", "value_re", "value_im", "oracle_re",
                    "oracle_im", "abs_err", "scaled_err"], rows)
        summary["artifacts"].append("thm3.csv")

    if "zeros" in cfg["tasks"]:
        rows, stats = [], []
        rho = s.pack.rho
        for n in degrees:
            if n < 1:
                continue
            # double-precision coefficient roundoff can create or destroy
            # zeros deep inside the curve (|P_n| is exponentially small
            # there), so the counting runs on the extended-precision oracle
            hp = orc.monic_orthogonal(s.curve, s.weight, n, N=s.oracle_N,
                                      dtype=np.clongdouble)
            pd = orc.PolyCoeffs(n, hp.coeffs.astype(np.complex128),
                                hp.norm, hp.gamma)
            zs = zr.roots(pd, s.curve)
            for k, z in enumerate(zs.zeros):
                rows.append((n, k, z.real, z.imag, float(zs.abs_phi[k]),
                             float(zs.angle_phi[k])))
            ks = zr.equilibrium_compare(zs, s.curve, rho)
            u = s.weight.u_count if s.weight.kind == "singular" else 1
            ext_count = n - zr.count_zeros_inside_level(hp, s.curve, rho + 0.1)
            c_in = max(rho - 0.1, rho * 0.5)
            inn_count = (zr.count_zeros_inside_level(hp, s.curve, c_in)
                         if c_in > s.curve.rho_hat else 0)
            stats.append({"n": n, "ks": ks["ks"], "exterior_count": ext_count,
                          "interior_count": inn_count,
                          "interior_allowed": u - 1})
            if svg:
                name = f"zeros_n{n}.svg"
                zr.zero_scatter_svg(zs, s.curve, rho, out / name)
                summary["artifacts"].append(name)
        _write_csv(out / "zeros.csv",
                   ["n", "k", "re", "im", "abs_phi", "angle_phi"], rows)
        summary["artifacts"].append("zeros.csv")
        summary["checks"]["zeros"] = {
            "stats": stats,
            "pass": all(st["ks"] < 0.15 and st["exterior_count"] == 0
                        and st["interior_count"] <= st["interior_allowed"]
                        for st in stats if st["n"] >= 30)}

    if "proposition" in cfg["tasks"]:
        pc = cfg["proposition"]
        betas = pc.get("beta", [0.5, 1.5, 2.0])
        rho_p = float(pc.get("rho", 0.5))
        delta = float(pc.get("delta", 0.1))
        ns = pc.get("n", [10, 20, 40, 80])
        rows = []
        for beta in betas:
            for vname, v in (("1", [1.0]), ("1+t", [1.0, 1.0])):
                for n in ns:
                    q = asym.proposition_I(v, beta, rho_p, delta, n)
                    a = asym.proposition_I(v, beta, rho_p, delta, n,
                                           mode="asymptotic")
                    rel = abs(q - a) / max(abs(a), 1e-300)
                    rows.append((float(beta), vname, n, q.real, q.imag,
                                 a.real, a.imag, rel))
        _write_csv(out / "proposition.csv",
                   ["beta", "v", "n", "quad_re", "quad_im", "asym_re",
                    "asym_im", "rel_err"], rows)
        summary["artifacts"].append("proposition.csv")

    failed = [k for k, v in summary["checks"].items()
              if isinstance(v, dict) and v.get("pass") is False]
    summary["check_failures"] = failed
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
    if check and failed:
        return 3, summary
    return 0, summary


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="curveortho",
        description="Orthogonal polynomials on analytic Jordan curves: "
                    "expansions, oracle comparisons, asymptotics, zeros.")
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="execute an experiment config")
    runp.add_argument("config", help="path to the experiment JSON config")
    runp.add_argument("--check", action="store_true",
                      help="enforce acceptance thresholds (exit 3 on failure)")
    runp.add_argument("--nodes", type=int, default=None,
                      help="override the expansion node count")
    runp.add_argument("--svg", action="store_true", help="emit zero scatter SVGs")
    runp.add_argument("--out", default=None, help="output directory override")
    runp.add_argument("--jobs", type=int,
                      default=int(os.environ.get("CURVEORTHO_THREADS", "1")),
                      help="parallel degree workers (default: CURVEORTHO_THREADS or 1)")
    runp.add_argument("--verbose", action="store_true",
                      help="per-degree term/bound logs")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command != "run":
        parser.print_help()
        return 1
    try:
        cfg = load_config(args.config)
        if args.nodes is not None:
            e = cfg["expansion"]
            cfg["expansion"] = ExpansionConfig(
                r=e.r, N=args.nodes, tol=e.tol, k_max=e.k_max,
                adapt_nodes=e.adapt_nodes)
        code, _ = run(cfg, out_dir=args.out, check=args.check, jobs=args.jobs,
                      svg=args.svg, verbose=args.verbose)
        return code
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 2
    except CurveOrthoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
