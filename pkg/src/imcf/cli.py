"""Command line interface.

Subcommands:

* ``solve``  - flow one family and write samples.csv / profile or path
  JSON / manifest.json,
* ``verify`` - run verification suites (product equation, numeric oracle
  agreement, curvature identities, finite-difference isoparametricity)
  and report one line per check,
* ``mesh``   - export one showcase scene as OBJ and PLY meshes,
* ``sweep``  - scan the top curvature of a spherical family and compare
  collapse times between the closed form and the numeric boundary search.

Exit codes: 0 success, 1 verification failure, 2 domain/usage error,
3 numerical failure.  A config file (TOML or JSON by extension) may set
any long option; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from . import closedform, geomviz, isocatalog, numflow
from .errors import DomainError, ImcfError, NumericalError, UnknownName
from .spaceform import SPHERICAL, PrincipalSpectrum

CASES = ("euclid", "horo", "hyp-umbilic", "hyp-cylinder", "sphere")

DEFAULTS = {
    "out_dir": ".",
    "tol": 1e-9,
    "t_min": -6.0,
    "t_max": 6.0,
    "grid_points": 33,
    "samples": 33,
    "m": None,
    "r0": 1.0,
    "workers": 4,
    "count": 16,
    "only": None,
}


# ---------------------------------------------------------------------------
# argument handling


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--tol", type=float)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--config")


def _add_case(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", choices=CASES)
    p.add_argument("--g", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k1", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=float)
    p.add_argument("--r0", type=float)
    p.add_argument(
        "--multiplicities",
        help="comma-separated per-block multiplicities (numeric extension)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imcf",
        description="Inverse mean curvature flow by parallel hypersurfaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="flow one family and write samples")
    _add_common(p_solve)
    _add_case(p_solve)

    p_verify = sub.add_parser("verify", help="run verification suites")
    _add_common(p_verify)
    _add_case(p_verify)
    p_verify.add_argument(
        "--only",
        choices=("product", "oracle", "identities", "isoparametric"),
    )
    p_verify.add_argument("--samples", type=int)

    p_mesh = sub.add_parser("mesh", help="export a showcase scene")
    _add_common(p_mesh)
    p_mesh.add_argument("--scene", choices=geomviz.SCENE_NAMES)

    p_sweep = sub.add_parser("sweep", help="scan k1 for a spherical family")
    _add_common(p_sweep)
    p_sweep.add_argument("--g", type=int)
    p_sweep.add_argument("--m", type=int)
    p_sweep.add_argument("--k1-min", dest="k1_min", type=float)
    p_sweep.add_argument("--k1-max", dest="k1_max", type=float)
    p_sweep.add_argument("--count", type=int)
    p_sweep.add_argument("--workers", type=int)
    return parser


def _load_config(path: str) -> dict:
    if not os.path.exists(path):
        raise DomainError(f"config file {path!r} does not exist")
    if path.endswith(".toml"):
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    elif path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
    else:
        raise DomainError(f"config {path!r} must end in .toml or .json")
    if not isinstance(data, dict):
        raise DomainError(f"config {path!r} must hold a table/object at top level")
    return data


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over config-file values over defaults.

    A flag that was not given stays None in the namespace, so the config
    value (then the default) shows through.
    """
    cfg = dict(DEFAULTS)
    ns = vars(args)
    if ns.get("config"):
        file_cfg = _load_config(ns["config"])
        unknown = set(file_cfg) - set(ns) - set(DEFAULTS)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key, val in ns.items():
        if key == "config" or val is None:
            continue
        cfg[key] = val
    cfg.pop("command", None)
    return cfg


# ---------------------------------------------------------------------------
# spectrum resolution


def resolve_spectrum(cfg: dict) -> PrincipalSpectrum:
    case = cfg.get("case")
    if not case:
        raise DomainError("no --case given (and none in the config file)")
    if case == "sphere":
        if cfg.get("g") is None or cfg.get("k1") is None:
            raise DomainError("sphere needs --g and --k1")
        m = cfg.get("m") or 1
        spec = isocatalog.sphere_spectrum_from_k1(int(cfg["g"]), float(cfg["k1"]), int(m))
        mults = cfg.get("multiplicities")
        if mults:
            if isinstance(mults, str):
                mults = [int(x) for x in mults.split(",")]
            mults = [int(x) for x in mults]
            if len(mults) != spec.g:
                raise DomainError(
                    f"need {spec.g} multiplicities for g={spec.g}, got {mults!r}"
                )
            spec = PrincipalSpectrum(
                sf=SPHERICAL,
                n=sum(mults),
                entries=tuple(zip(spec.curvatures, mults)),
                meta=dict(spec.meta),
            )
        return spec
    if case == "euclid":
        if cfg.get("n") is None:
            raise DomainError("euclid needs --n")
        n = int(cfg["n"])
        m = int(cfg["m"]) if cfg.get("m") else n
        return isocatalog.euclidean_spectrum(n=n, m=m, r0=float(cfg["r0"]))
    if case in ("horo", "hyp-umbilic"):
        if cfg.get("n") is None or cfg.get("k") is None:
            raise DomainError(f"{case} needs --n and --k")
        kind = "horosphere" if case == "horo" else "umbilic"
        return isocatalog.hyperbolic_spectrum(kind, n=int(cfg["n"]), k=float(cfg["k"]))
    if case == "hyp-cylinder":
        if cfg.get("k1") is None:
            raise DomainError("hyp-cylinder needs --k1 (and --n or --m)")
        if cfg.get("n") is not None:
            n = int(cfg["n"])
            m = int(cfg["m"]) if cfg.get("m") else n // 2
        elif cfg.get("m"):
            m = int(cfg["m"])
            n = 2 * m
        else:
            raise DomainError("hyp-cylinder needs --n or --m")
        return isocatalog.hyperbolic_spectrum("cylinder", n=n, k1=float(cfg["k1"]), m=m)
    raise UnknownName(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# output helpers


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) for x in row])


def _write_manifest(out_dir, command: str, cfg: dict, outputs, extra=None) -> None:
    manifest = {
        "version": __version__,
        "command": command,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "outputs": sorted(outputs),
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _clip_window(interval, t_min: float, t_max: float, inset: float = 1e-9):
    lo, hi = interval
    lo_eff = t_min if math.isinf(lo) else max(t_min, lo + inset)
    hi_eff = t_max if math.isinf(hi) else min(t_max, hi - inset)
    if not lo_eff < hi_eff:
        raise DomainError(
            f"window [{t_min!r}, {t_max!r}] misses the existence interval {interval!r}"
        )
    return lo_eff, hi_eff


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(cfg: dict) -> int:
    spectrum = resolve_spectrum(cfg)
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    outputs = ["samples.csv", "manifest.json"]
    if numflow.is_extension(spectrum):
        grid = np.linspace(cfg["t_min"], cfg["t_max"], int(cfg["grid_points"]))
        if not np.any(grid == 0.0):
            grid = np.sort(np.append(grid, 0.0))
        path = numflow.continuation_sweep(spectrum, grid)
        header = ("t", "mu", "H_t", "residual")
        rows = [
            (t, mu, h, r)
            for (t, mu, h), r in zip(path.samples, path.residual())
        ]
        record = numflow.path_to_dict(path)
        outputs.append("path.json")
        with open(os.path.join(out_dir, "path.json"), "w", newline="\n") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
            fh.write("\n")
        route = "numeric_extension"
    else:
        profile = closedform.solve(spectrum, allow_negative_k=True)
        lo, hi = _clip_window(profile.interval, cfg["t_min"], cfg["t_max"])
        ts = np.linspace(lo, hi, int(cfg["grid_points"]))
        header = ("t", "mu", "H_t", "product_residual")
        rows = list(zip(ts, profile.mu(ts), profile.h(ts), profile.residual(ts)))
        record = closedform.profile_to_dict(profile)
        outputs.append("profile.json")
        with open(os.path.join(out_dir, "profile.json"), "w", newline="\n") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
            fh.write("\n")
        route = "closed_form"
        print(f"t_star={profile.t_star!r} classification={profile.classification}")
    _write_csv(os.path.join(out_dir, "samples.csv"), header, rows)
    _write_manifest(out_dir, "solve", cfg, outputs, extra={"route": route})
    print(f"wrote {len(rows)} samples via {route} to {out_dir}")
    return 0


def _battery(cfg: dict):
    """(name, spectrum) pairs exercised by the verification suites."""
    if cfg.get("case"):
        return [(cfg["case"], resolve_spectrum(cfg))]
    root2 = math.sqrt(2.0)
    g4 = isocatalog.sphere_spectrum_from_k1(4, 3.0, 1)
    g4_ext = PrincipalSpectrum(
        sf=SPHERICAL,
        n=6,
        entries=tuple(zip(g4.curvatures, (1, 2, 1, 2))),
    )
    return [
        ("euclid_sphere", isocatalog.euclidean_spectrum(2, 2, 1.0)),
        ("euclid_cylinder", isocatalog.euclidean_spectrum(2, 1, 1.0)),
        ("horo", isocatalog.hyperbolic_spectrum("horosphere", 2, k=1.0)),
        ("hyp_umbilic_ball", isocatalog.hyperbolic_spectrum("umbilic", 2, k=2.0)),
        ("hyp_umbilic_equidistant", isocatalog.hyperbolic_spectrum("umbilic", 2, k=0.5)),
        ("hyp_cylinder", isocatalog.hyperbolic_spectrum("cylinder", 2, k1=root2, m=1)),
        ("sphere_g2", isocatalog.sphere_spectrum_from_k1(2, root2, 1)),
        ("sphere_g4", g4),
        ("sphere_g4_mixed", g4_ext),
    ]


def cmd_verify(cfg: dict) -> int:
    only = cfg.get("only")
    n_samples = int(cfg.get("samples") or 33)
    tol = float(cfg["tol"])
    checks = []

    if only in (None, "product"):
        for name, spec in _battery(cfg):
            checks.append(("product:" + name, _check_product(spec, cfg, n_samples)))
    if only in (None, "oracle"):
        for name, spec in _battery(cfg):
            checks.append(("oracle:" + name, _check_oracle(spec, cfg, tol, n_samples)))
    if only in (None, "identities"):
        gs = (int(cfg["g"]),) if cfg.get("g") else (2, 3, 4, 6)
        rng = np.random.default_rng(20260815)
        for g in gs:
            # Inset from the generator bound: the rational reference
            # forms divide by k1**2 - bound**2, so draws hugging the
            # bound measure float conditioning, not the identities.
            lo = isocatalog.ADMISSIBLE_K1[g] + 0.05
            worst = 0.0
            for k1 in rng.uniform(lo, lo + 6.0, size=n_samples):
                rep = isocatalog.verify_identities(
                    isocatalog.sphere_spectrum_from_k1(g, float(k1), 1)
                )
                worst = max(worst, rep.max_residual)
            checks.append(
                (
                    f"identities:g{g}",
                    (worst <= 1e-11, f"max residual {worst:.3e} over {n_samples} draws"),
                )
            )
    if only in (None, "isoparametric"):
        for name in isocatalog.EXAMPLE_NAMES:
            rep = isocatalog.check_isoparametric(isocatalog.example_immersion(name))
            worst = max((r.spread for r in rep.rows), default=0.0)
            checks.append(
                (f"isoparametric:{name}", (rep.passed, f"max spread {worst:.3e}"))
            )
        neg = isocatalog.check_isoparametric(isocatalog.perturbed_torus_immersion())
        checks.append(
            (
                "isoparametric:perturbed_torus(control)",
                (not neg.passed, "control rejected" if not neg.passed else "control slipped through"),
            )
        )

    failures = 0
    for name, (ok, detail) in checks:
        mark = "ok  " if ok else "FAIL"
        print(f"{mark} {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1


def _check_product(spec, cfg, n_samples):
    try:
        if numflow.is_extension(spec):
            grid = np.linspace(cfg["t_min"], cfg["t_max"], n_samples)
            if not np.any(grid == 0.0):
                grid = np.sort(np.append(grid, 0.0))
            path = numflow.continuation_sweep(spec, grid)
            worst = float(np.max(np.abs(np.expm1(path.residual()))))
            label = "max relative product defect"
        else:
            profile = closedform.solve(spec, allow_negative_k=True)
            lo, hi = _clip_window(profile.interval, cfg["t_min"], cfg["t_max"])
            ts = np.linspace(lo, hi, n_samples)
            worst = float(np.max(profile.residual(ts)))
            label = "max absolute product defect"
    except ImcfError as exc:
        return False, f"errored: {exc}"
    return worst <= 1e-10, f"{label} {worst:.3e}"


def _check_oracle(spec, cfg, tol, n_samples):
    try:
        if numflow.is_extension(spec):
            # No closed form to compare against; check ODE vs Newton.
            grid = np.linspace(
                max(cfg["t_min"], -6.0), min(cfg["t_max"], 6.0), n_samples
            )
            if not np.any(grid == 0.0):
                grid = np.sort(np.append(grid, 0.0))
            sweep = numflow.continuation_sweep(spec, grid)
            ode = numflow.integrate_mu(
                spec, (float(grid[0]), float(grid[-1])), tol=tol,
                t_eval=[t for t, _, _ in sweep.samples],
            )
            n = min(len(ode.samples), len(sweep.samples))
            worst = float(np.max(np.abs(ode.mu[:n] - sweep.mu[:n])))
        else:
            profile = closedform.solve(spec, allow_negative_k=True)
            # Stay off finite endpoints: mu' = -1/H blows up there and the
            # ODE's mu error scales like tol/sqrt(distance to collapse).
            lo, hi = _clip_window(
                profile.interval, cfg["t_min"], cfg["t_max"], inset=1e-2
            )
            lo, hi = max(lo, -6.0), min(hi, 6.0)
            ts = np.linspace(lo, hi, n_samples)
            if not np.any(ts == 0.0):
                ts = np.sort(np.append(ts, 0.0))
            ode = numflow.integrate_mu(spec, (float(ts[0]), float(ts[-1])), tol=tol, t_eval=ts)
            worst = float(np.max(np.abs(ode.mu - profile.mu(ode.t))))
    except ImcfError as exc:
        return False, f"errored: {exc}"
    return worst <= 100.0 * tol, f"max |mu_ode - mu_ref| = {worst:.3e}"


def cmd_mesh(cfg: dict) -> int:
    scene = cfg.get("scene")
    if not scene:
        raise DomainError("no --scene given")
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    grid_n = int(cfg["grid_points"]) if cfg.get("grid_points") else 64
    meshes = geomviz.figure_scene(scene, grid=(grid_n, grid_n))
    outputs = ["manifest.json"]
    for stem, mesh in meshes:
        for ext in (".obj", ".ply"):
            geomviz.export_mesh(mesh, os.path.join(out_dir, stem + ext))
            outputs.append(stem + ext)
    _write_manifest(out_dir, "mesh", cfg, outputs, extra={"scene": scene})
    print(f"wrote {len(meshes)} meshes for {scene} to {out_dir}")
    return 0


def cmd_sweep(cfg: dict) -> int:
    g = int(cfg["g"]) if cfg.get("g") else 2
    m = int(cfg["m"]) if cfg.get("m") else 1
    k1_min = cfg.get("k1_min")
    k1_max = cfg.get("k1_max")
    if k1_min is None or k1_max is None:
        raise DomainError("sweep needs --k1-min and --k1-max")
    count = int(cfg["count"])
    workers = max(1, int(cfg["workers"]))
    bound = closedform.mean_convex_bound(g)
    if float(k1_min) <= bound:
        raise DomainError(
            f"k1_min={k1_min!r} is not mean-convex for g={g}; need k1 > {bound!r}"
        )
    k1s = np.linspace(float(k1_min), float(k1_max), count)

    def job(k1: float):
        spec = isocatalog.sphere_spectrum_from_k1(g, float(k1), m)
        profile = closedform.solve(spec)
        t_star = profile.interval[1]
        grid = np.linspace(0.0, t_star + 1.0, 9)
        path = numflow.continuation_sweep(spec, grid)
        t_num, kind = numflow.estimate_boundary(path, "upper")
        return (
            float(k1),
            profile.a,
            t_star,
            t_num,
            abs(t_star - t_num),
            kind.value,
        )

    shards = np.array_split(np.arange(count), workers)
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    outputs = ["manifest.json"]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {}
        for si, shard in enumerate(shards):
            if len(shard) == 0:
                continue
            futures[si] = [(int(i), pool.submit(job, k1s[i])) for i in shard]
        for si, items in sorted(futures.items()):
            name = f"sweep_{si:02d}.csv"
            with open(os.path.join(out_dir, name), "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(("k1", "a", "t_star", "t_star_numeric", "abs_diff", "kind"))
                for _, fut in items:
                    row = fut.result()
                    writer.writerow([repr(float(x)) for x in row[:-1]] + [row[-1]])
            outputs.append(name)
    _write_manifest(out_dir, "sweep", cfg, outputs, extra={"g": g, "m": m})
    print(f"swept {count} values of k1 into {len(outputs) - 1} shards in {out_dir}")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "mesh":
            return cmd_mesh(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        raise DomainError(f"unknown command {args.command!r}")
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
