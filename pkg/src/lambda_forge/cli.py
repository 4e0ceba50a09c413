"""Command-line front end.

    lambda-forge <command> [--config job.yaml] [--out DIR] [--threads N] [--seed S] [--strict]

Jobs are YAML files whose numeric fields are decimal strings. Every command
writes a JSON report (sorted keys; wall-clock data kept under ``runtime``) and a
short text summary. Exit status: 0 all checks pass, 1 a check failed,
2 configuration error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from . import complexfn as cf
from .dirichletfit import AdmissibleCompact, fit, halfplane_deviation, validate_admissible
from .errors import ConfigError, LambdaForgeError, NumericError, PipelineError
from .interpolation import DiscRegion, InterpolationSet, PlantedZeroSet
from .perturb import (
    SYNTHETIC,
    LFunctionHandle,
    build_nu,
    certify_perturbation,
    epsilon_budget,
    path,
    perturb,
    product_decomposition,
    restore,
)
from .zeros import RectRegion, WeilPolynomial, completed_winding, critical_scan, weil_check, winding_count

COMMANDS = ("verify", "perturb", "restore", "decompose", "path", "scan", "weil", "fit", "grid")
THREADS_ENV = "LAMBDA_FORGE_THREADS"
MAX_GRID = 4096

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


# --------------------------------------------------------------------------
# config parsing

def _real(x, name: str) -> float:
    if isinstance(x, bool) or x is None:
        raise ConfigError(f"{name}: expected a decimal number, got {x!r}")
    try:
        v = float(str(x).strip())
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {x!r} as a decimal number") from None
    if not math.isfinite(v):
        raise ConfigError(f"{name}: must be finite")
    return v


def _int(x, name: str) -> int:
    if isinstance(x, bool) or x is None:
        raise ConfigError(f"{name}: expected an integer, got {x!r}")
    try:
        return int(str(x).strip())
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {x!r} as an integer") from None


def _complex(x, name: str) -> complex:
    """A point given as [re, im] or as a single real."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"{name}: a complex point is [re, im]")
        return complex(_real(x[0], name + ".re"), _real(x[1], name + ".im"))
    return complex(_real(x, name), 0.0)


def _rect(x, name: str) -> RectRegion:
    if not isinstance(x, (list, tuple)) or len(x) != 4:
        raise ConfigError(f"{name}: a rectangle is [re_min, re_max, im_min, im_max]")
    vals = [_real(v, f"{name}[{i}]") for i, v in enumerate(x)]
    try:
        return RectRegion(*vals)
    except NumericError as exc:
        raise ConfigError(f"{name}: {exc}") from None


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{key}: expected a mapping")
    return sec


def _opt(sec: dict, key: str, default, conv, name: str):
    return conv(sec[key], name) if sec.get(key) is not None else default


@dataclass
class ScanSpec:
    t_min: float
    t_max: float
    step: float = 0.05
    width: float = 0.25
    height_tol: float = 1e-6
    function: str = "base"


@dataclass
class FitSpec:
    rects: tuple
    targets: tuple
    n_terms: int
    samples: int = 24
    ridge: float = 0.0
    delta: Optional[float] = None
    sup_tol: Optional[float] = None
    require_halfplane: bool = False
    points: tuple = ()


@dataclass
class GridSpec:
    region: RectRegion
    resolution: tuple
    function: str = "base"
    completed: bool = False
    filename: str = "grid.csv"


@dataclass
class JobConfig:
    command: str
    base: dict
    radius: float = 2.0
    planted: tuple = ()
    interpolation: Optional[tuple] = None
    eps: float = 1e-3
    eps0: Optional[float] = None
    fe_tol: float = 1e-8
    planted_tol: float = 1e-8
    symmetry_tol: float = 1e-10
    product_tol: float = 1e-9
    winding_radius: float = 0.05
    rects: tuple = ()
    scan: Optional[ScanSpec] = None
    fit: Optional[FitSpec] = None
    weil: Optional[tuple] = None
    path_ts: tuple = tuple(round(0.1 * k, 10) for k in range(1, 11))
    path_radius: float = 0.1
    grid: Optional[GridSpec] = None
    restore_degree: int = 40
    exclude: tuple = ()
    interior: int = 4096
    boundary: int = 4096
    fe_grid: int = 20
    seed: int = 0
    strict: bool = False
    echo: dict = field(default_factory=dict)


def _base_spec(raw) -> dict:
    if raw is None:
        return {"kind": "riemann_zeta"}
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("base: expected a mapping with a 'kind'")
    kind = raw["kind"]
    if kind == "riemann_zeta" or kind == "constant_one":
        return {"kind": kind}
    if kind == "dirichlet_l":
        if "kronecker" in raw:
            return {"kind": kind, "kronecker": _int(raw["kronecker"], "base.kronecker")}
        if "modulus" in raw and "values" in raw:
            return {"kind": kind, "modulus": _int(raw["modulus"], "base.modulus"),
                    "values": [_int(v, "base.values") for v in raw["values"]]}
        raise ConfigError("base: dirichlet_l needs 'kronecker' or 'modulus' and 'values'")
    if kind == "synthetic":
        name = raw.get("name")
        if name not in SYNTHETIC:
            raise ConfigError(f"base: unknown synthetic function {name!r}")
        return {"kind": kind, "name": name}
    raise ConfigError(f"base: unknown kind {kind!r}")


def parse_config(raw: dict, command: str, *, seed: Optional[int] = None,
                 strict: bool = False) -> JobConfig:
    """Validate a parsed YAML mapping against the preconditions of ``command``."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a mapping")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cfg_cmd = raw.get("command")
    if cfg_cmd is not None and cfg_cmd != command:
        raise ConfigError(f"config is for {cfg_cmd!r} but {command!r} was requested")
    echo = dict(raw)
    echo["command"] = command
    if seed is not None:
        echo["seed"] = str(seed)
    strict = strict or bool(raw.get("strict", False))
    echo["strict"] = strict

    cfg = JobConfig(command=command, base=_base_spec(raw.get("base")), echo=echo, strict=strict)
    cfg.seed = _int(echo["seed"], "seed") if echo.get("seed") is not None else 0
    if cfg.seed < 0:
        raise ConfigError("seed must be non-negative")

    disc = _section(raw, "disc")
    cfg.radius = _opt(disc, "radius", cfg.radius, _real, "disc.radius")
    if disc.get("center") is not None and _complex(disc["center"], "disc.center") != 0.5:
        raise ConfigError("disc.center is fixed at 0.5")
    if not cfg.radius > 0:
        raise ConfigError("disc.radius must be positive")

    planted = raw.get("planted") or []
    if not isinstance(planted, list):
        raise ConfigError("planted: expected a list of points")
    cfg.planted = tuple(_complex(a, f"planted[{i}]") for i, a in enumerate(planted))

    if raw.get("interpolation") is not None:
        items = []
        for i, item in enumerate(raw["interpolation"]):
            if not isinstance(item, dict) or "point" not in item:
                raise ConfigError(f"interpolation[{i}]: expected {{point, order}}")
            items.append((_complex(item["point"], f"interpolation[{i}].point"),
                          _int(item.get("order", 1), f"interpolation[{i}].order")))
        cfg.interpolation = tuple(items)

    tol = _section(raw, "tolerances")
    cfg.eps = _opt(tol, "eps", cfg.eps, _real, "tolerances.eps")
    cfg.eps0 = _opt(tol, "eps0", None, _real, "tolerances.eps0")
    cfg.fe_tol = _opt(tol, "fe", cfg.fe_tol, _real, "tolerances.fe")
    cfg.planted_tol = _opt(tol, "planted", cfg.planted_tol, _real, "tolerances.planted")
    cfg.symmetry_tol = _opt(tol, "symmetry", cfg.symmetry_tol, _real, "tolerances.symmetry")
    cfg.product_tol = _opt(tol, "product", cfg.product_tol, _real, "tolerances.product")
    for name in ("eps", "fe_tol", "planted_tol", "symmetry_tol", "product_tol"):
        if not getattr(cfg, name) > 0:
            raise ConfigError(f"tolerance {name} must be positive")
    if cfg.eps0 is not None and not 0 < cfg.eps0 < 0.5:
        raise ConfigError("tolerances.eps0 must lie in (0, 1/2)")

    smp = _section(raw, "samples")
    cfg.interior = _opt(smp, "interior", cfg.interior, _int, "samples.interior")
    cfg.boundary = _opt(smp, "boundary", cfg.boundary, _int, "samples.boundary")
    cfg.fe_grid = _opt(smp, "fe_grid", cfg.fe_grid, _int, "samples.fe_grid")
    cfg.winding_radius = _opt(smp, "winding_radius", cfg.winding_radius, _real, "samples.winding_radius")
    if cfg.interior < 16 or cfg.boundary < 64 or cfg.fe_grid < 2:
        raise ConfigError("samples: need interior >= 16, boundary >= 64, fe_grid >= 2")

    cfg.rects = tuple(_rect(r, f"rects[{i}]") for i, r in enumerate(raw.get("rects") or []))

    rs = _section(raw, "restore")
    cfg.restore_degree = _opt(rs, "degree", cfg.restore_degree, _int, "restore.degree")
    cfg.exclude = tuple(
        DiscRegion(_complex(e.get("center"), f"restore.exclude[{i}].center"),
                   _real(e.get("radius"), f"restore.exclude[{i}].radius"))
        for i, e in enumerate(rs.get("exclude") or []))

    if raw.get("scan") is not None:
        sc = _section(raw, "scan")
        cfg.scan = ScanSpec(_real(sc.get("t_min"), "scan.t_min"), _real(sc.get("t_max"), "scan.t_max"))
        cfg.scan.step = _opt(sc, "step", cfg.scan.step, _real, "scan.step")
        cfg.scan.width = _opt(sc, "width", cfg.scan.width, _real, "scan.width")
        cfg.scan.height_tol = _opt(sc, "height_tol", cfg.scan.height_tol, _real, "scan.height_tol")
        cfg.scan.function = sc.get("function", "base")
        if not (cfg.scan.t_max > cfg.scan.t_min and cfg.scan.step > 0 and 0 < cfg.scan.width < 0.5):
            raise ConfigError("scan: need t_max > t_min, step > 0 and 0 < width < 1/2")

    pt = _section(raw, "path")
    if pt.get("t") is not None:
        cfg.path_ts = tuple(_real(t, "path.t") for t in pt["t"])
    cfg.path_radius = _opt(pt, "radius", cfg.path_radius, _real, "path.radius")
    if any(not 0.0 <= t <= 1.0 for t in cfg.path_ts):
        raise ConfigError("path.t values must lie in [0, 1]")

    if raw.get("weil") is not None:
        w = _section(raw, "weil")
        coeffs = tuple(_real(c, "weil.coeffs") for c in (w.get("coeffs") or []))
        q = _real(w.get("q"), "weil.q")
        if len(coeffs) < 1 or (len(coeffs) - 1) % 2:
            raise ConfigError("weil.coeffs must have even degree 2g")
        if coeffs[0] != 1.0 or not q > 1:
            raise ConfigError("weil: need P(0) = 1 and q > 1")
        cfg.weil = (coeffs, q)

    if raw.get("fit") is not None:
        cfg.fit = _fit_spec(_section(raw, "fit"))

    if raw.get("grid") is not None:
        gr = _section(raw, "grid")
        res = gr.get("resolution") or [64, 64]
        if not isinstance(res, list) or len(res) != 2:
            raise ConfigError("grid.resolution is [n_re, n_im]")
        res = (_int(res[0], "grid.resolution"), _int(res[1], "grid.resolution"))
        if not all(1 <= r <= MAX_GRID for r in res):
            raise ConfigError(f"grid.resolution must lie in [1, {MAX_GRID}] per axis")
        cfg.grid = GridSpec(_rect(gr.get("region"), "grid.region"), res,
                            gr.get("function", "base"), bool(gr.get("completed", False)),
                            str(gr.get("file", "grid.csv")))
        if cfg.grid.function not in ("base", "perturbed"):
            raise ConfigError("grid.function is 'base' or 'perturbed'")

    _check_command(cfg)
    return cfg


def _fit_spec(sec: dict) -> FitSpec:
    rects = tuple(_rect(r, f"fit.rects[{i}]") for i, r in enumerate(sec.get("rects") or []))
    if not rects:
        raise ConfigError("fit.rects must list at least one rectangle")
    targets = sec.get("targets") or ["zeta"] * len(rects)
    if isinstance(targets, str):
        targets = [targets] * len(rects)
    if len(targets) != len(rects) or any(t not in ("zeta", "zero") for t in targets):
        raise ConfigError("fit.targets: one of 'zeta' or 'zero' per rectangle")
    spec = FitSpec(rects, tuple(targets), _int(sec.get("n_terms"), "fit.n_terms"))
    spec.samples = _opt(sec, "samples", spec.samples, _int, "fit.samples")
    spec.ridge = _opt(sec, "ridge", spec.ridge, _real, "fit.ridge")
    spec.delta = _opt(sec, "delta", None, _real, "fit.delta")
    spec.sup_tol = _opt(sec, "sup_tol", None, _real, "fit.sup_tol")
    spec.require_halfplane = bool(sec.get("require_halfplane", False))
    spec.points = tuple((_complex(p.get("point"), f"fit.points[{i}].point"),
                         _complex(p.get("value", "0"), f"fit.points[{i}].value"))
                        for i, p in enumerate(sec.get("points") or []))
    check = validate_admissible(AdmissibleCompact(rects))
    if not check:
        raise ConfigError("fit.rects not admissible: " + "; ".join(check.violations))
    if spec.n_terms < 1 or spec.samples < 2 or spec.ridge < 0:
        raise ConfigError("fit: need n_terms >= 1, samples >= 2, ridge >= 0")
    if spec.delta is not None and not spec.delta > 0:
        raise ConfigError("fit.delta must be positive")
    if spec.require_halfplane and spec.delta is None:
        raise ConfigError("fit.require_halfplane needs fit.delta")
    return spec


def _check_command(cfg: JobConfig) -> None:
    cmd = cfg.command
    needs_nu = cmd in ("perturb", "restore", "decompose", "path") or (
        cfg.grid is not None and cfg.grid.function == "perturbed") or (
        cfg.scan is not None and cfg.scan.function != "base")
    if needs_nu:
        if cfg.strict and not cfg.planted:
            raise ConfigError("strict mode: the planted set is empty, so g would equal f")
        disc = DiscRegion(0.5, cfg.radius)
        for a in cfg.planted:
            if disc.contains(a):
                raise ConfigError(f"planted point {a} is not strictly outside the disc")
        for b, m in cfg.interpolation or ():
            if not disc.contains(b, strict=True):
                raise ConfigError(f"interpolation point {b} is not interior to the disc")
            if m < 1:
                raise ConfigError("interpolation orders must be positive")
    if cmd == "scan" and cfg.scan is None:
        raise ConfigError("scan needs a 'scan' section")
    if cfg.scan is not None and cfg.scan.function not in ("base", "perturbed", "restored"):
        raise ConfigError("scan.function is 'base', 'perturbed' or 'restored'")
    if cmd == "weil" and cfg.weil is None:
        raise ConfigError("weil needs a 'weil' section")
    if cmd == "fit" and cfg.fit is None:
        raise ConfigError("fit needs a 'fit' section")
    if cmd == "grid" and cfg.grid is None:
        raise ConfigError("grid needs a 'grid' section")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None


# --------------------------------------------------------------------------
# pipeline

def base_handle(spec: dict):
    """(handle, functional equation) for a base spec."""
    kind = spec["kind"]
    if kind == "riemann_zeta":
        return LFunctionHandle.zeta(), cf.FunctionalEquation()
    if kind == "dirichlet_l":
        try:
            chi = (cf.DirichletCharacter.kronecker(spec["kronecker"]) if "kronecker" in spec
                   else cf.DirichletCharacter(spec["modulus"], tuple(spec["values"])))
        except NumericError as exc:
            raise ConfigError(f"base: {exc}") from None
        return LFunctionHandle.dirichlet(chi), cf.FunctionalEquation(cf.dirichlet_q(chi), 1, True)
    if kind == "constant_one":
        return LFunctionHandle.one(), cf.FunctionalEquation(cf.QFactor())
    sign = -1 if spec["name"] == "antisymmetric_quintic" else 1
    return LFunctionHandle.synthetic_fn(spec["name"]), cf.FunctionalEquation(cf.QFactor(), sign)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class Job:
    """Runs one command; collects checks, results and stage timings."""

    def __init__(self, cfg: JobConfig, threads: int = 1):
        self.cfg = cfg
        self.threads = max(1, int(threads))
        self.checks: dict = {}
        self.results: dict = {}
        self.timings: dict = {}
        self._cache: dict = {}

    # bookkeeping --------------------------------------------------------
    @contextlib.contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        except PipelineError:
            raise
        except NumericError as exc:
            raise PipelineError(name, exc) from exc
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0

    def check(self, name: str, value, tol, relation: str = "<") -> bool:
        if relation == "<":
            ok = bool(value < tol)
        elif relation == "==":
            ok = bool(value == tol)
        elif relation == "<=":
            ok = bool(value <= tol)
        else:  # pragma: no cover
            raise ValueError(relation)
        self.checks[name] = {"value": value, "tol": tol, "relation": relation, "pass": ok}
        return ok

    def pmap(self, fn, items):
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    # shared construction ------------------------------------------------
    def base(self):
        if "base" not in self._cache:
            self._cache["base"] = base_handle(self.cfg.base)
        return self._cache["base"]

    def disc(self) -> DiscRegion:
        return DiscRegion(0.5, self.cfg.radius)

    def construction(self):
        """(f, eq, planted, nu_result, g, certificate) for g = nu f."""
        if "nu" in self._cache:
            return self._cache["nu"]
        cfg = self.cfg
        f, eq = self.base()
        disc = self.disc()
        planted = PlantedZeroSet(cfg.planted)
        if cfg.interpolation is None:
            poles = [(b, m) for b, m in f.poles() if disc.contains(b, strict=True)]
            interp = InterpolationSet.symmetric(poles)
        else:
            try:
                interp = InterpolationSet(cfg.interpolation)
            except NumericError as exc:
                raise ConfigError(f"interpolation: {exc}") from None
        with self.stage("epsilon_budget"):
            m_boundary, eps0 = epsilon_budget(f, disc, cfg.eps, cfg.boundary)
        if cfg.eps0 is not None:
            eps0 = cfg.eps0
        with self.stage("build_nu"):
            nr = build_nu(planted, interp, disc, min(eps0, 0.49), strict=cfg.strict,
                          off_axes=False, boundary_samples=cfg.boundary)
        with self.stage("perturb"):
            g = perturb(f, nr.nu, disc)
        with self.stage("certify"):
            cert = certify_perturbation(
                f, g, nr, planted, disc, eq, cfg.eps, m_boundary, interior=cfg.interior,
                grid_n=cfg.fe_grid, fe_tol=cfg.fe_tol, planted_tol=cfg.planted_tol,
                symmetry_tol=cfg.symmetry_tol, seed=cfg.seed)
        self._cache["nu"] = (f, eq, planted, nr, g, cert)
        return self._cache["nu"]

    def restoration(self):
        if "restore" in self._cache:
            return self._cache["restore"]
        f, eq, planted, nr, g, cert = self.construction()
        with self.stage("restore"):
            rr = restore(g, nr.nu, self.disc(), self.cfg.exclude, self.cfg.eps,
                         degree=self.cfg.restore_degree, boundary_samples=min(self.cfg.boundary, 1024),
                         interior=self.cfg.interior, seed=self.cfg.seed)
        self._cache["restore"] = rr
        return rr

    def _record_certificate(self, cert):
        self.results["certificate"] = cert.to_dict()
        for name, v in cert.verdict.items():
            self.check(name, v["value"], v["tol"])

    def covering_rects(self, planted: PlantedZeroSet) -> list:
        """Upper and lower rectangles that contain every planted orbit, off the real axis."""
        if self.cfg.rects:
            return list(self.cfg.rects)
        if not planted.closure:
            return []
        re = [a.real for a in planted.closure]
        im = max(abs(a.imag) for a in planted.closure)
        lo, hi = min(re) - 0.5, max(re) + 0.5
        top = im + 0.6
        return [RectRegion(lo, hi, 0.05, top), RectRegion(lo, hi, -top, -0.05)]

    # commands -----------------------------------------------------------
    def run_verify(self):
        f, eq = self.base()
        with self.stage("fe_residual"):
            pts = cf.grid((-2.0, 3.0), (-30.0, 30.0), self.cfg.fe_grid, self.cfg.fe_grid,
                          exclude=((0.0, 0.1), (1.0, 0.1)))
            fe = np.asarray(cf.fe_residual(f, eq, pts))
            lam = np.asarray(cf.lambda_eval(f, eq, pts))
            conj = np.asarray(cf.lambda_eval(f, eq, np.conj(pts)))
            real = np.abs(lam - np.conj(conj)) / (1.0 + np.abs(lam))
        self.results["fe_grid_points"] = int(pts.size)
        self.check("fe_residual_max", float(fe.max()), self.cfg.fe_tol)
        self.check("real_symmetry_max", float(real.max()), self.cfg.fe_tol)

    def _planted_windings(self, f, g, eq, planted):
        r = self.cfg.winding_radius
        def count(args):
            h, a = args
            return completed_winding(h, eq, DiscRegion(a, r))
        with self.stage("winding"):
            wg = self.pmap(count, [(g, a) for a in planted.closure])
            wf = self.pmap(count, [(f, a) for a in planted.closure])
        self.results["planted_windings"] = [
            {"point": a, "g": int(x), "f": int(y)} for a, x, y in zip(planted.closure, wg, wf)]
        for i, (x, y) in enumerate(zip(wg, wf)):
            self.check(f"winding_g_planted_{i}", int(x), 1, "==")
            self.check(f"winding_f_planted_{i}", int(y), 0, "==")

    def run_perturb(self):
        f, eq, planted, nr, g, cert = self.construction()
        self.results["nu"] = nr.fragment()
        self.results["nu_coeffs"] = nr.nu.to_dict()
        self._record_certificate(cert)
        self._planted_windings(f, g, eq, planted)

    def _scan_pair(self, fn_a, fn_b, eq, label):
        sc = self.cfg.scan
        with self.stage("scan"):
            ha, hb = self.pmap(lambda h: critical_scan(h, eq, sc.t_min, sc.t_max, sc.step),
                               [fn_a, fn_b])
        self.results[f"heights_{label}"] = ha
        self.results["heights_base"] = hb
        self.check(f"height_count_{label}", len(ha), len(hb), "==")
        diff = max((abs(x - y) for x, y in zip(ha, hb)), default=0.0) if len(ha) == len(hb) else math.inf
        self.check(f"height_match_{label}", diff, sc.height_tol)

    def run_restore(self):
        f, eq, planted, nr, g, cert = self.construction()
        self._record_certificate(cert)
        rr = self.restoration()
        self.results["restore"] = {"h_degree": rr.h.degree, "closeness_max": rr.closeness_max,
                                   "fit_residual": rr.fit_residual, "sample_count": rr.sample_count,
                                   "h_coeffs": rr.h.to_dict()}
        self.check("restore_closeness", rr.closeness_max, self.cfg.eps)
        rects = self.covering_rects(planted)
        with self.stage("winding"):
            wp = self.pmap(lambda r: completed_winding(rr.g_plus, eq, r), rects)
            wf = self.pmap(lambda r: completed_winding(f, eq, r), rects)
        self.results["off_axis_windings"] = [
            {"rect": r.to_list(), "g_plus": int(x), "f": int(y)} for r, x, y in zip(rects, wp, wf)]
        for i, (x, y) in enumerate(zip(wp, wf)):
            self.check(f"off_axis_winding_{i}", int(x), int(y), "==")
        if self.cfg.scan is not None:
            self._scan_pair(rr.g_plus, f, eq, "restored")

    def run_decompose(self):
        f, eq, planted, nr, g, cert = self.construction()
        self._record_certificate(cert)
        rr = self.restoration()
        with self.stage("decompose"):
            pd = product_decomposition(rr)
            pts = self.disc().interior_samples(self.cfg.interior, seed=self.cfg.seed + 1)
            for ex in self.cfg.exclude:
                pts = pts[np.abs(pts - ex.center) > ex.radius]
            res = pd.identity_residual(pts)
        self.results["decomposition"] = {"b": pd.b.describe(), "zeta_plus": pd.zeta_plus.describe(),
                                         "samples": int(pts.size)}
        self.check("product_identity", res, self.cfg.product_tol)

    def run_path(self):
        f, eq, planted, nr, g, cert = self.construction()
        self._record_certificate(cert)
        seeds = planted.seeds
        ts = self.cfg.path_ts
        with self.stage("path"):
            def count(args):
                t, a = args
                return winding_count(path(f, g, t).handle, DiscRegion(a, self.cfg.path_radius))
            flat = self.pmap(count, [(t, a) for a in seeds for t in ts])
            pts = self.disc().interior_samples(256, seed=self.cfg.seed)
            start = np.array_equal(path(f, g, 0.0).handle(pts), f(pts))
            end = np.array_equal(path(f, g, 1.0).handle(pts), g(pts))
        table = []
        for i, a in enumerate(seeds):
            w = [int(x) for x in flat[i * len(ts):(i + 1) * len(ts)]]
            table.append({"point": a, "t": list(ts), "winding": w})
            first = next((k for k, x in enumerate(w) if x == 1), None)
            stable = first is not None and all(x == 1 for x in w[first:])
            self.check(f"path_stable_{i}", int(stable), 1, "==")
        self.results["path"] = table
        self.check("path_endpoint_f", int(start), 1, "==")
        self.check("path_endpoint_g", int(end), 1, "==")

    def _scan_function(self):
        which = self.cfg.scan.function
        f, eq = self.base()
        if which == "base":
            return f, eq
        if which == "perturbed":
            return self.construction()[4], eq
        return self.restoration().g_plus, eq

    def run_scan(self):
        sc = self.cfg.scan
        h, eq = self._scan_function()
        with self.stage("scan"):
            heights = critical_scan(h, eq, sc.t_min, sc.t_max, sc.step)
        rect = RectRegion(0.5 - sc.width, 0.5 + sc.width, sc.t_min, sc.t_max)
        with self.stage("winding"):
            w = completed_winding(h, eq, rect)
        self.results["heights"] = heights
        self.results["rect"] = rect.to_list()
        self.results["winding"] = int(w)
        # every zero in the rectangle should be one of the axis zeros found
        self.check("scan_matches_winding", len(heights), int(w), "==")

    def run_weil(self):
        coeffs, q = self.cfg.weil
        with self.stage("weil"):
            p = WeilPolynomial(coeffs, q, (len(coeffs) - 1) // 2)
            res = weil_check(p)
        self.results["weil"] = {"roots": res.roots, "root_moduli": [abs(r) for r in res.roots],
                                "printed_identity_ok": res.printed_identity_ok,
                                "reciprocal_identity_ok": res.reciprocal_identity_ok}
        self.check("weil_functional_equation", int(res.functional_ok), 1, "==")
        self.check("weil_riemann_hypothesis", int(res.rh_ok), 1, "==")

    def run_fit(self):
        spec = self.cfg.fit
        zeta = lambda z: cf.zeta(z)
        targets = [zeta if t == "zeta" else (lambda z: np.zeros_like(np.asarray(z, dtype=complex)))
                   for t in spec.targets]
        with self.stage("fit"):
            res = fit(targets, AdmissibleCompact(spec.rects), spec.n_terms, spec.samples,
                      spec.ridge, points=spec.points)
        self.results["fit"] = res.to_dict()
        self.results["note"] = ("fixed-N least-squares demonstration of the approximation "
                                "phenomenon; not a universal series")
        if spec.sup_tol is not None:
            self.check("fit_sup_error", res.sup_error, spec.sup_tol)
        if spec.delta is not None:
            with self.stage("halfplane"):
                hd = halfplane_deviation(res.poly, spec.delta)
            self.results["halfplane"] = hd.to_dict()
            # at desk-scale N the bound rarely meets delta, so it gates only on request
            if spec.require_halfplane:
                self.check("halfplane_bound", hd.certified_bound, spec.delta)

    def run_grid(self):
        gs = self.cfg.grid
        f, eq = self.base()
        h = f if gs.function == "base" else self.construction()[4]
        with self.stage("grid"):
            rows = grid_rows(h, gs.region, gs.resolution, eq if gs.completed else None)
        self._cache["grid_rows"] = rows
        self.results["grid"] = {"rows": len(rows), "file": gs.filename,
                                "resolution": list(gs.resolution), "completed": gs.completed}

    def run(self) -> dict:
        t0 = time.perf_counter()
        getattr(self, "run_" + self.cfg.command)()
        report = {
            "tool": {"name": "lambda_forge", "version": __version__},
            "command": self.cfg.command,
            "config": self.cfg.echo,
            "checks": self.checks,
            "results": self.results,
            "passed": all(c["pass"] for c in self.checks.values()),
            "runtime": {"wall_s": time.perf_counter() - t0, "stages_s": self.timings,
                        "threads": self.threads},
        }
        return _jsonable(report)


def run(cfg: JobConfig, threads: int = 1) -> dict:
    return Job(cfg, threads).run()


# --------------------------------------------------------------------------
# output

def grid_rows(f, region: RectRegion, resolution, eq: Optional[cf.FunctionalEquation] = None):
    """(re, im, |f|, arg f) in row-major order: re varies fastest within each im row."""
    n_re, n_im = resolution
    if not (1 <= n_re <= MAX_GRID and 1 <= n_im <= MAX_GRID):
        raise ConfigError(f"grid resolution must lie in [1, {MAX_GRID}] per axis")
    xs = np.linspace(region.re_min, region.re_max, n_re)
    ys = np.linspace(region.im_min, region.im_max, n_im)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    if eq is not None:
        lg = np.asarray(cf.lambda_log(f, eq, z))
        with np.errstate(over="ignore"):
            mod = np.exp(lg.real)
        arg = np.angle(np.exp(1j * lg.imag))
    else:
        v = np.asarray(f(z), dtype=np.complex128)
        mod, arg = np.abs(v), np.angle(v)
    return list(zip(z.real.tolist(), z.imag.tolist(), mod.tolist(), arg.tolist()))


def emit_grid(f, region: RectRegion, resolution, path_or_file,
              eq: Optional[cf.FunctionalEquation] = None) -> int:
    """Write the CSV grid; returns the number of data rows."""
    rows = grid_rows(f, region, resolution, eq)
    _write_rows(rows, path_or_file)
    return len(rows)


def _write_rows(rows, path_or_file):
    lines = ["re,im,abs,arg"] + [",".join(repr(float(v)) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        Path(path_or_file).write_text(text, encoding="utf-8")


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def summary_text(report: dict) -> str:
    lines = [f"lambda_forge {report['tool']['version']} {report['command']}: "
             + ("PASS" if report["passed"] else "FAIL")]
    for name, c in sorted(report["checks"].items()):
        mark = "ok  " if c["pass"] else "FAIL"
        lines.append(f"  {mark} {name}: {c['value']} {c['relation']} {c['tol']}")
    lines.append(f"  wall time {report['runtime']['wall_s']:.2f} s")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point

def _threads(arg: Optional[int]) -> int:
    if arg is not None:
        n = arg
    else:
        env = os.environ.get(THREADS_ENV)
        if env is None or env.strip() == "":
            return 1
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={env!r} is not an integer") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lambda-forge", description="Build and certify perturbed L-functions.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML job file")
        sp.add_argument("--out", help="directory for report.json, summary.txt and grid files")
        sp.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
        sp.add_argument("--seed", type=int, help="seed for randomized sample sets")
        sp.add_argument("--strict", action="store_true", help="reject jobs whose g would equal f")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        threads = _threads(args.threads)
        cfg = parse_config(load_config(args.config), args.command, seed=args.seed, strict=args.strict)
        job = Job(cfg, threads)
        report = job.run()
        text = dumps_report(report)
        summary = summary_text(report)
        if args.out:
            out = Path(args.out)
            try:
                out.mkdir(parents=True, exist_ok=True)
                (out / "report.json").write_text(text, encoding="utf-8")
                (out / "summary.txt").write_text(summary, encoding="utf-8")
                if "grid_rows" in job._cache:
                    _write_rows(job._cache["grid_rows"], out / cfg.grid.filename)
            except OSError as exc:
                raise ConfigError(f"cannot write to {out}: {exc}") from None
            sys.stdout.write(summary)
        else:
            if "grid_rows" in job._cache:
                try:
                    _write_rows(job._cache["grid_rows"], cfg.grid.filename)
                except OSError as exc:
                    raise ConfigError(f"cannot write {cfg.grid.filename}: {exc}") from None
            sys.stdout.write(text)
            sys.stderr.write(summary)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except LambdaForgeError as exc:  # pragma: no cover
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_PASS if report["passed"] else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
