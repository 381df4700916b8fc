"""Command-line pipeline: scatter -> asym -> evolve -> compare, plus selftest.

All outputs are plain CSV/JSON, written atomically (temp file + rename).
Exit codes: 0 success, 1 numerical failure, 2 configuration/IO error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, get_tol

FMT = "%.17g"


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(FMT % v if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _c2pair(z):
    return [float(np.real(z)), float(np.imag(z))]


# ---------------------------------------------------------------------------
# scatter
# ---------------------------------------------------------------------------


def cmd_scatter(cfg: RunConfig) -> int:
    from . import scattering as sc

    data = cfg.build_initial_data()
    mass = abs(data.mass())
    if mass > get_tol("mass_condition"):
        print(f"error: mass condition violated (|int u1| = {mass:.3e})", file=sys.stderr)
        return 1
    refl = sc.reflection_coefficients(data, n_per_arc=cfg.n_per_arc)

    rows = []
    for a_idx in range(6):
        for i, th in enumerate(refl.nodes[a_idx]):
            rows.append((a_idx, float(th),
                         float(refl.r1[a_idx][i].real), float(refl.r1[a_idx][i].imag),
                         float(refl.r2[a_idx][i].real), float(refl.r2[a_idx][i].imag),
                         float(refl.s11[a_idx][i].real), float(refl.s11[a_idx][i].imag),
                         float(refl.sA11[a_idx][i].real), float(refl.sA11[a_idx][i].imag)))
    _write_csv(cfg.out_dir / "reflection.csv",
               ["arc", "theta", "re_r1", "im_r1", "re_r2", "im_r2",
                "re_s11", "im_s11", "re_sA11", "im_sA11"], rows)

    mode = cfg.solitons.get("mode", "none")
    if mode == "detect":
        zeros = sc.find_s11_zeros(data)
        sol = sc.residue_constants(data, zeros) if zeros else sc.SolitonData([], [], [])
    elif mode == "explicit":
        from .spectral import OMEGA

        zs = [complex(a, b) for a, b in cfg.solitons.get("zeros", [])]
        cs = [complex(a, b) for a, b in cfg.solitons.get("c", [])]
        ds = [None if abs(z.imag) < 1e-12 else
              (np.conj(z) ** 2 - 1) / (OMEGA**2 * (OMEGA**2 - np.conj(z) ** 2)) * np.conj(c)
              for z, c in zip(zs, cs)]
        sol = sc.SolitonData(zeros=zs, c=cs, d=ds)
    else:
        sol = sc.SolitonData([], [], [])
    sol_payload = {
        "zeros": [_c2pair(z) for z in sol.zeros],
        "c": [_c2pair(c) for c in sol.c],
        "d": [None if d is None else _c2pair(d) for d in sol.d],
    }
    _atomic_write(cfg.out_dir / "solitons.json", json.dumps(sol_payload, indent=1))

    report = sc.assumption_validators(data, refl, solitons=sol,
                                      r1_segment_tol=get_tol("r1_segment"))
    _atomic_write(cfg.out_dir / "validators.json",
                  json.dumps(_plain(report), indent=1))
    if not report["ok"]:
        print("validator failure; see validators.json", file=sys.stderr)
        return 1
    print(f"scatter: wrote reflection.csv ({len(rows)} samples), solitons.json, "
          f"validators.json to {cfg.out_dir}")
    return 0


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# asym
# ---------------------------------------------------------------------------


def load_reflection(out_dir: Path):
    from . import scattering as sc

    path = Path(out_dir) / "reflection.csv"
    if not path.exists():
        raise ConfigError(f"missing scatter output: {path}")
    per_arc = {i: {"theta": [], "r1": [], "r2": [], "s11": [], "sA11": []}
               for i in range(6)}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            a = int(row["arc"])
            per_arc[a]["theta"].append(float(row["theta"]))
            per_arc[a]["r1"].append(complex(float(row["re_r1"]), float(row["im_r1"])))
            per_arc[a]["r2"].append(complex(float(row["re_r2"]), float(row["im_r2"])))
            per_arc[a]["s11"].append(complex(float(row["re_s11"]), float(row["im_s11"])))
            per_arc[a]["sA11"].append(complex(float(row["re_sA11"]),
                                              float(row["im_sA11"])))
    n = len(per_arc[0]["theta"])
    return sc.ReflectionData(
        nodes=[np.array(per_arc[a]["theta"]) for a in range(6)],
        r1=[np.array(per_arc[a]["r1"]) for a in range(6)],
        r2=[np.array(per_arc[a]["r2"]) for a in range(6)],
        s11=[np.array(per_arc[a]["s11"]) for a in range(6)],
        sA11=[np.array(per_arc[a]["sA11"]) for a in range(6)],
        n_per_arc=n,
    )


def load_solitons(out_dir: Path):
    from . import scattering as sc

    path = Path(out_dir) / "solitons.json"
    if not path.exists():
        return sc.SolitonData([], [], [])
    raw = json.loads(path.read_text())
    return sc.SolitonData(
        zeros=[complex(a, b) for a, b in raw["zeros"]],
        c=[complex(a, b) for a, b in raw["c"]],
        d=[None if d is None else complex(d[0], d[1]) for d in raw["d"]],
    )


def _asym_worker(args):
    from . import asymptotics as asy

    z, cf, sol, t_values, debug = args
    ing = asy.build_ingredients(float(z), cf, solitons=sol)
    rows = []
    for t in t_values:
        ev = asy.u_asym(float(z) * t, t, ing)
        rows.append((ev.x, ev.t, ev.zeta, ev.A1, ev.A2, ev.alpha1, ev.alpha2, ev.u))
    dbg = None
    if debug:
        dbg = (float(z),
               complex(ing.D1_wk4), complex(ing.D2_w2k2),
               complex(ing.chi1_wk4), complex(ing.chit2_wk4), complex(ing.chit3_wk4),
               complex(ing.chi2_w2k2), complex(ing.chi3_w2k2),
               complex(ing.chit4_w2k2), complex(ing.chit5_w2k2))
    return rows, dbg


def cmd_asym(cfg: RunConfig, debug_deltas: bool = False) -> int:
    from . import cauchy as cy

    refl = load_reflection(cfg.out_dir)
    sol = load_solitons(cfg.out_dir)
    cf = cy.CircleFunctions(refl)
    zetas = [float(z) for z in
             np.linspace(cfg.zeta_window[0], cfg.zeta_window[1], cfg.n_zeta)]
    skipped = 0
    keep = []
    for z in zetas:
        if cfg.zeta_window[0] - 1e-12 <= z <= cfg.zeta_window[1] + 1e-12:
            keep.append(z)
        else:
            skipped += 1
            print(f"warning: skipping zeta={z} outside window", file=sys.stderr)
    worker_args = [(z, cf, sol, cfg.t_values, debug_deltas) for z in keep]
    if cfg.jobs > 1:
        import concurrent.futures as cfut

        with cfut.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_asym_worker, worker_args))
    else:
        results = [_asym_worker(a) for a in worker_args]
    rows = [r for res, _ in results for r in res]
    _write_csv(cfg.out_dir / "asymptotics.csv",
               ["x", "t", "zeta", "A1", "A2", "alpha1", "alpha2", "u_asym"], rows)
    if debug_deltas:
        dbg_rows = []
        for _, dbg in results:
            z = dbg[0]
            for name, v in zip(("D1_wk4", "D2_w2k2", "chi1_wk4", "chit2_wk4",
                                "chit3_wk4", "chi2_w2k2", "chi3_w2k2",
                                "chit4_w2k2", "chit5_w2k2"), dbg[1:]):
                dbg_rows.append((z, name, float(v.real), float(v.imag)))
        _write_csv(cfg.out_dir / "deltas_debug.csv",
                   ["zeta", "quantity", "re", "im"], dbg_rows)
    print(f"asym: wrote asymptotics.csv ({len(rows)} rows, {skipped} skipped)")
    return 0


# ---------------------------------------------------------------------------
# evolve / compare
# ---------------------------------------------------------------------------


def _pde_data(cfg: RunConfig):
    """Initial data re-sampled on the long periodic grid of the PDE stage."""
    from . import scattering as sc

    p = cfg.pde
    idata = dict(cfg.initial_data)
    if "csv" in idata:
        return sc.load_csv(idata["csv"])
    idata["L"] = float(p.get("L", 760.0))
    idata["n"] = int(p.get("n", 8193))
    return RunConfig(initial_data=idata, out_dir=cfg.out_dir).build_initial_data()


def cmd_evolve(cfg: RunConfig) -> int:
    from . import pde

    data = _pde_data(cfg)
    p = cfg.pde
    dt = float(p.get("dt", 0.1))
    cutoff = float(p.get("cutoff", 0.9))
    T = max(cfg.t_values)
    snaps = pde.evolve(data, T, dt=dt, cutoff=cutoff, snapshot_times=list(cfg.t_values))
    for snap in snaps:
        rows = list(zip(snap.x, snap.u, snap.ut))
        _write_csv(cfg.out_dir / f"evolution_t{snap.t:g}.csv", ["x", "u", "u_t"], rows)
        uh = snap.uhat()
        xi = 2 * np.pi * np.fft.rfftfreq(len(snap.x) - 1, d=snap.x[1] - snap.x[0])
        _write_csv(cfg.out_dir / f"spectrum_t{snap.t:g}.csv", ["xi", "abs_uhat"],
                   list(zip(xi, np.abs(uh))))
    print(f"evolve: wrote {len(snaps)} snapshots to {cfg.out_dir}")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    from . import pde

    asym_path = cfg.out_dir / "asymptotics.csv"
    if not asym_path.exists():
        raise ConfigError(f"missing asym output: {asym_path}")
    table = {}
    with open(asym_path, newline="") as fh:
        for row in csv.DictReader(fh):
            table.setdefault(float(row["t"]), []).append(
                (float(row["zeta"]), float(row["u_asym"])))
    snaps = []
    for t in cfg.t_values:
        path = cfg.out_dir / f"evolution_t{t:g}.csv"
        if not path.exists():
            raise ConfigError(f"missing evolve output: {path}")
        xs, us, uts = [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                xs.append(float(row["x"]))
                us.append(float(row["u"]))
                uts.append(float(row["u_t"]))
        snaps.append(pde.FieldSnapshot(x=np.array(xs), u=np.array(us),
                                       ut=np.array(uts), t=t,
                                       cutoff=float(cfg.pde.get("cutoff", 0.9))))

    def ua_fn(zetas, t):
        rows = sorted(table[t])
        zs = np.array([r[0] for r in rows])
        vals = np.array([r[1] for r in rows])
        if len(zs) != len(zetas) or np.max(np.abs(zs - zetas)) > 1e-9:
            raise ConfigError("asymptotics.csv zeta grid does not match the config")
        return vals

    rep = pde.compare(ua_fn, snaps, cfg.zeta_window, cfg.n_zeta)
    rows = [(r["t"], r["max_err"], r["rms_err"], r["envelope_pde"], r["envelope_asym"])
            for r in rep["rows"]]
    _write_csv(cfg.out_dir / "compare.csv",
               ["t", "max_err", "rms_err", "envelope_pde", "envelope_asym"], rows)
    lines = ["comparison of leading-order formula against filtered spectral evolution",
             f"zeta window: [{cfg.zeta_window[0]}, {cfg.zeta_window[1]}]"
             f" with {cfg.n_zeta} points",
             f"times: {list(cfg.t_values)}",
             f"envelope decay exponent (fit of max|u_pde| vs t): "
             f"{rep['envelope_exponent']:+.4f}",
             f"error ratios between consecutive times: "
             f"{['%.4f' % r for r in rep['error_ratios']]}"]
    for r in rep["rows"]:
        lines.append(f"  t={r['t']:g}: max_err={r['max_err']:.6e} "
                     f"rms_err={r['rms_err']:.6e} envelope={r['envelope_pde']:.6e}")
    _atomic_write(cfg.out_dir / "compare_summary.txt", "\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def cmd_selftest() -> int:
    from . import asymptotics as asy
    from . import gammafn
    from . import spectral as sp

    ok = True

    def check(name, cond):
        nonlocal ok
        print(f"  {'pass' if cond else 'FAIL'}  {name}")
        ok &= bool(cond)

    rng = np.random.default_rng(11)
    ks = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    ks = ks[np.abs(ks) > 0.1]
    p = sp.phase_values(ks)
    check("sum of linear phases vanishes", np.max(np.abs(p.l.sum(0))) < 1e-13)
    check("sum of quadratic phases vanishes", np.max(np.abs(p.z.sum(0))) < 1e-13)
    z = 0.7
    sad = sp.saddle_points(z)
    check("saddle moduli on unit circle",
          max(abs(abs(sad.k2) - 1), abs(abs(sad.k4) - 1)) < 1e-12)
    h = 1e-6
    d = abs(sp.phi(2, 1, z, sad.k4 + h) - sp.phi(2, 1, z, sad.k4 - h)) / (2 * h)
    check("saddle derivative vanishes (finite difference)", d < 1e-8)
    th = rng.uniform(0, 2 * np.pi, 5)
    rel = sp.phi(3, 1, z, np.exp(1j * th)) + sp.phi(2, 1, z, sp.OMEGA**2 * np.exp(1j * th))
    check("phase rotation relation", np.max(np.abs(rel)) < 1e-14)
    nu = 0.37
    lhs = abs(np.exp(gammafn.log_gamma(1j * nu)))
    check("gamma modulus identity",
          abs(lhs - gammafn.abs_gamma_imag_axis(nu)) < 1e-12)
    prod_ok = True
    for _ in range(20):
        q1 = rng.standard_normal() + 1j * rng.standard_normal()
        q3 = (rng.standard_normal() + 1j * rng.standard_normal()) * 0.4
        if 1 + abs(q1) ** 2 - abs(q3) ** 2 <= 0.05:
            continue
        b12, b21 = asy.model_beta(1, q1, q3)
        hat = (np.log(1 + abs(q1) ** 2) - np.log(1 + abs(q1) ** 2 - abs(q3) ** 2)) / (2 * np.pi)
        prod_ok &= abs(b12 * b21 - hat) < 1e-12
    check("model coefficient product identity", prod_ok)
    check("empty soliton set gives unit product",
          abs(asy.blaschke_P(0.3 + 0.2j, None) - 1) == 0)
    print("selftest:", "all passed" if ok else "FAILURES")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bqist",
                                 description="Boussinesq inverse scattering and "
                                             "long-time asymptotics pipeline")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("scatter", "asym", "evolve", "compare"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--jobs", type=int, default=1)
        if name == "asym":
            p.add_argument("--debug-deltas", action="store_true",
                           help="dump the per-zeta delta/chi ingredients to CSV")
    sub.add_parser("selftest")
    args = ap.parse_args(argv)

    if args.command == "selftest":
        return cmd_selftest()
    try:
        cfg = RunConfig.load(args.config, out_dir=args.out)
        if args.jobs:
            cfg.jobs = args.jobs
        if args.command == "asym":
            return cmd_asym(cfg, debug_deltas=getattr(args, "debug_deltas", False))
        handler = {"scatter": cmd_scatter,
                   "evolve": cmd_evolve, "compare": cmd_compare}[args.command]
        return handler(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, FileNotFoundError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failures
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
