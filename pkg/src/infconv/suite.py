"""Suite configuration and execution.

A config is one JSON document::

    {"grids": {"1": {"half_width": 6, "count": 241}},
     "quadrature_order": 64,
     "checks": [{"id": "tau-quad", "inequality_id": "symmetric_tau",
                 "family": "quadratic:a=1", "dim": 1, "tolerance": 0.01}]}

``tolerance`` is relative for integral checks and absolute for pointwise ones.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from . import verify as V
from .errors import ConfigError, UsageError
from .families import parse_family
from .grid import DEFAULT_GRIDS, GridSpec, make_grid
from .report import csv_text, dumps

INTEGRAL_IDS = {"symmetric_tau", "tau_quarter", "ball", "prekopa_leindler", "alpha", "beta",
                "santalo_volume"}
KNOWN_KEYS = {"id", "inequality_id", "family", "families", "dim", "tolerance", "grid", "seed",
              "u", "v", "w", "random_grid", "eps_list", "eps_power", "C", "K_fit", "K_fit_from",
              "p", "count", "degree", "order", "p_list", "M_bound", "split", "refine",
              "membership_grid", "min_slope"}


@dataclass
class SuiteConfig:
    grids: dict = field(default_factory=dict)
    quadrature_order: int = V.DEFAULT_ORDER
    checks: list = field(default_factory=list)

    def grid_for(self, dim: int, override: dict | None = None) -> GridSpec:
        base = self.grids.get(dim)
        if base is None:
            L, n = DEFAULT_GRIDS[dim]
            base = {"half_width": L, "count": n}
        g = dict(base)
        if override:
            g.update(override)
        try:
            return make_grid(dim, g["half_width"], g["count"])
        except KeyError as exc:
            raise ConfigError(f"grid entry missing {exc.args[0]!r}") from None


def parse_config(doc: dict | str) -> SuiteConfig:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - {"grids", "quadrature_order", "checks", "description"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    grids = {}
    for k, v in (doc.get("grids") or {}).items():
        try:
            grids[int(k)] = dict(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad grid entry {k!r}") from None
    order = doc.get("quadrature_order", V.DEFAULT_ORDER)
    if not isinstance(order, int):
        raise ConfigError("quadrature_order must be an integer")
    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("checks must be a list")
    seen = set()
    for i, c in enumerate(checks):
        if not isinstance(c, dict) or "inequality_id" not in c:
            raise ConfigError(f"check #{i} needs an inequality_id")
        if c["inequality_id"] not in V.MODES:
            raise ConfigError(f"unknown inequality_id {c['inequality_id']!r}")
        bad = set(c) - KNOWN_KEYS
        if bad:
            raise ConfigError(f"check #{i} has unknown keys {sorted(bad)}")
        cid = c.get("id", f"{c['inequality_id']}-{i}")
        if cid in seen:
            raise ConfigError(f"duplicate check id {cid!r}")
        seen.add(cid)
        # parse family strings early so unknown names fail before any work
        for key in ("family", "u", "v", "w"):
            if key in c:
                parse_family(c[key])
        for fam in c.get("families", []):
            parse_family(fam)
        if c["inequality_id"] == "tensorization" and "K_fit" not in c and "K_fit_from" not in c:
            raise ConfigError(f"check {cid!r}: tensorization needs K_fit or K_fit_from")
        if "K_fit_from" in c and c["K_fit_from"] not in seen:
            raise ConfigError(f"check {cid!r}: K_fit_from must name an earlier check")
    return SuiteConfig(grids, order, checks)


def load_config(path) -> SuiteConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def default_config() -> SuiteConfig:
    return parse_config(resources.files("infconv").joinpath("data/default_suite.json").read_text())


def _rel(c: dict, default: float = V.INTEGRAL_REL_TOL) -> float:
    return float(c.get("tolerance", default))


def run_check(c: dict, cfg: SuiteConfig, k_fits: dict | None = None,
              backend: str | None = None) -> V.VerificationReport:
    """Run one configured check; usage errors propagate."""
    mode = c["inequality_id"]
    dim = int(c.get("dim", 2 if mode in ("beta", "steiner_pointwise", "dimension_trick",
                                          "santalo_volume") else 1))
    spec = cfg.grid_for(dim, c.get("grid"))
    if mode in ("symmetric_tau", "tau_quarter", "ball"):
        r = V.verify_product_inequality(c["family"], mode, spec, cfg.quadrature_order,
                                        rel_tol=_rel(c), backend=backend)
    elif mode == "prekopa_leindler":
        r = V.verify_prekopa_leindler(c["u"], c["v"], c["w"], spec, rel_tol=_rel(c))
    elif mode in ("alpha", "beta", "steiner_pointwise"):
        if "random_grid" in c:
            f = V.random_even_grid(spec, int(c["random_grid"]["seed"]),
                                   float(c["random_grid"].get("noise", 0.1)))
        else:
            f = c["family"]
        tol = _rel(c, V.LATTICE_TOL if mode == "steiner_pointwise" else V.INTEGRAL_REL_TOL)
        r = V.verify_symmetrization(f, mode, spec, dim, rel_tol=tol, split=c.get("split"),
                                    backend=backend)
        if mode == "steiner_pointwise":
            r.tolerance = tol
        if "random_grid" in c:
            r.inputs["function"] = f"random_even_grid(seed={int(c['random_grid']['seed'])})"
    elif mode in ("small_eps", "tensorization"):
        K = c.get("K_fit")
        if K is None and "K_fit_from" in c:
            K = (k_fits or {}).get(c["K_fit_from"])
            if K is None:
                raise ConfigError(f"no K_fit available from {c['K_fit_from']!r}")
        sdim = 1 if mode == "small_eps" else 2
        grid = cfg.grid_for(sdim, c["grid"]) if "grid" in c else V.scaling_grid(sdim)
        mgrid = cfg.grid_for(sdim, c.get("membership_grid"))
        r = V.verify_scaling(c.get("family", "cosine_bump:frequency=1"),
                             c.get("eps_list", (0.4, 0.2, 0.1, 0.05)), mode,
                             float(c.get("eps_power", 2.0)), float(c.get("C", 1.0)),
                             grid, mgrid, K, float(c.get("min_slope", 2.9)),
                             c.get("refine"), backend)
    elif mode == "dimension_trick":
        grid = cfg.grid_for(2, c["grid"]) if "grid" in c else make_grid(2, 4.0, 81)
        r = V.verify_dimension_trick(c["family"], grid, backend)
    elif mode == "santalo_volume":
        r = V.verify_santalo_volume(float(c["p"]), spec, _rel(c), backend)
    elif mode == "symmetric_poincare":
        r = V.verify_symmetric_poincare(int(c.get("seed", 0)), int(c.get("count", 50)),
                                        int(c.get("degree", 8)), dim, int(c.get("order", 40)))
    elif mode == "concentration":
        r = V.verify_concentration(c["families"], tuple(c.get("p_list", (1, 2, 4, 8, 12, 16, 20))),
                                   float(c.get("M_bound", 2.0)), dim)
    else:  # pragma: no cover - parse_config rejects these
        raise ConfigError(f"unknown inequality_id {mode!r}")
    if "seed" in c:
        r.inputs["seed"] = c["seed"]
    if mode in INTEGRAL_IDS and "tolerance" in c:
        r.notes["relative_tolerance"] = float(c["tolerance"])
    r.check_id = c.get("id", "")
    return r


def thread_count() -> int:
    raw = os.environ.get("INFCONV_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"INFCONV_THREADS must be an integer, got {raw!r}") from None
    return max(n, 0)


def run_suite(config: SuiteConfig | dict | str, backend: str | None = None,
              threads: int | None = None) -> list[V.VerificationReport]:
    """Run every check in declaration order.

    Checks run concurrently (``INFCONV_THREADS``, 0 = sequential) except that a
    tensorization check waits for the small_eps run it takes ``K_fit`` from.
    The returned list follows the config order.
    """
    cfg = config if isinstance(config, SuiteConfig) else parse_config(config)
    for i, c in enumerate(cfg.checks):
        c.setdefault("id", f"{c['inequality_id']}-{i}")
    threads = thread_count() if threads is None else threads
    independent = [c for c in cfg.checks if "K_fit_from" not in c]
    dependent = [c for c in cfg.checks if "K_fit_from" in c]
    results: dict[str, V.VerificationReport] = {}
    if threads <= 1:
        for c in independent:
            results[c["id"]] = run_check(c, cfg, backend=backend)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {c["id"]: pool.submit(run_check, c, cfg, None, backend) for c in independent}
            for cid, fut in futures.items():
                results[cid] = fut.result()
    k_fits = {cid: r.notes.get("K_fit") for cid, r in results.items()
              if r.inequality_id == "small_eps"}
    for c in dependent:
        results[c["id"]] = run_check(c, cfg, k_fits, backend)
    return [results[c["id"]] for c in cfg.checks]


def reports_json(reports) -> str:
    return dumps({"all_pass": all(r.passed for r in reports),
                  "reports": [r.to_dict() for r in reports]})


def reports_csv(reports) -> str:
    rows = [{"id": r.check_id or r.inequality_id, "inequality_id": r.inequality_id,
             "lhs": r.lhs, "rhs": r.rhs, "margin": r.margin, "tolerance": r.tolerance,
             "pass": r.passed} for r in reports]
    return csv_text(rows, ["id", "inequality_id", "lhs", "rhs", "margin", "tolerance", "pass"])


def scaling_csv(reports) -> str:
    rows = []
    for r in reports:
        if r.inequality_id in ("small_eps", "tensorization"):
            for row in r.notes.get("table", []):
                rows.append({"id": r.check_id, "mode": r.inequality_id, **row})
    return csv_text(rows, ["id", "mode", "eps", "product", "excess", "floor", "lip",
                           "second_diff"])


__all__ = ["SuiteConfig", "parse_config", "load_config", "default_config", "run_check",
           "run_suite", "reports_json", "reports_csv", "scaling_csv", "thread_count",
           "UsageError"]
