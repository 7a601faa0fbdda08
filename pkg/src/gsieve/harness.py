"""Experiment orchestration: configs, identity suites, sweeps, reports.

Commands are plain functions taking an ExperimentConfig and returning a
(status, lines) pair; the CLI wraps them.  All randomness flows through
numpy's default_rng (PCG64) with explicit seeds, and every emitted row
carries the config hash and artifact version so reruns are comparable.

Exit statuses: 0 success, 1 identity/bound failure, 2 config error,
3 budget exceeded.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .gaussint import GaussInt, gcd_is_unit
from .lattice import lattice_from_modulus, poisson_two_sides
from .sieve import (
    BudgetExceededError,
    ModuliFamily,
    bounds,
    lhs_T,
    lhs_T_vector,
    make_coefficients,
)
from .spacing import LS_CONSTANT, K_euclid, K_norm, K_sup, farey_points
from .weights import fejer, g_and_hat_square, numeric_fourier, psi1
from .weylsum import (
    S2_squared_differenced,
    S2_squared_poisson,
    S_direct,
    WeylConfig,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "config_from_file",
    "dual_constants",
    "cmd_identities",
    "cmd_sweep",
    "cmd_spacing",
    "cmd_weyl",
    "cmd_duality",
    "cmd_report",
    "SWEEP_COLUMNS",
]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


class ConfigError(ValueError):
    """Raised for malformed configuration; message names the bad key."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat parameter bag shared by all subcommands.

    List fields must be nonempty and tolerances positive; validate()
    enforces this and to_dict()/from_dict() round-trip losslessly.
    """

    family: str = "all"
    k: int = 3
    Q: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    N: tuple[int, ...] = (4, 9, 16, 36, 64)
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    eps: float = 0.05
    tol: float = 1e-9
    associates: str = "literal"
    out: str = ""
    format: str = "csv"
    Q0: tuple[float, ...] = (5.0, 10.0, 20.0)
    trials: int = 10
    budget: int = 5_000_000

    _LISTS = ("Q", "N", "seeds", "Q0")

    def validate(self) -> None:
        for name in self._LISTS:
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"config key '{name}' must be a nonempty list")
        if self.family not in ("all", "squares", "power"):
            raise ConfigError("config key 'family' must be all, squares, or power")
        if self.associates not in ("literal", "units"):
            raise ConfigError("config key 'associates' must be literal or units")
        if self.format not in ("csv", "json"):
            raise ConfigError("config key 'format' must be csv or json")
        if self.tol <= 0:
            raise ConfigError("config key 'tol' must be positive")
        if self.eps < 0:
            raise ConfigError("config key 'eps' must be nonnegative")
        if self.k < 1:
            raise ConfigError("config key 'k' must be a positive integer")
        if self.trials < 1:
            raise ConfigError("config key 'trials' must be a positive integer")
        if self.budget < 1:
            raise ConfigError("config key 'budget' must be a positive integer")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        kw = {}
        names = {f.name for f in fields(cls)}
        for key, v in d.items():
            if key not in names:
                raise ConfigError(f"unknown config key '{key}'")
            kw[key] = tuple(v) if isinstance(v, list) else v
        return cls(**kw)

    def hash(self) -> str:
        d = self.to_dict()
        d.pop("out")  # the destination path is not part of the experiment
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def config_from_file(path: str) -> ExperimentConfig:
    """Flat key = value file; lists are comma-separated; '#' comments."""
    d: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key in ExperimentConfig._LISTS:
                d[key] = [_parse_scalar(s.strip()) for s in val.split(",") if s.strip()]
            else:
                d[key] = _parse_scalar(val)
    return ExperimentConfig.from_dict(d)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(columns: list[str], rows: list[dict], cfg: ExperimentConfig, stream) -> None:
    """Write rows as CSV or JSON with identical values in either format."""
    if cfg.format == "json":
        payload = [{c: row[c] for c in columns} for row in rows]
        json.dump(payload, stream, indent=1, default=str)
        stream.write("\n")
    else:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def _open_out(cfg: ExperimentConfig):
    if cfg.out:
        return open(cfg.out, "w")
    return None


# ---------------------------------------------------------------------------
# identities


def _check(name: str, disc: float, tol: float, lines: list[str]) -> bool:
    ok = disc <= tol
    lines.append(f"{'PASS' if ok else 'FAIL'}  {name:<38s} disc={disc:.3e}  tol={tol:.1e}")
    return ok


def cmd_identities(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    """Run the cross-checking identity suite and report discrepancies."""
    cfg.validate()
    tol = cfg.tol
    lines: list[str] = [f"identity suite  (config {cfg.hash()}, version {__version__})"]
    ok = True

    # Poisson summation for the self-dual Gaussian over modulus lattices.
    worst = 0.0
    w = psi1()
    for q in (GaussInt(1, 0), GaussInt(1, 1), GaussInt(3, 2)):
        lat = lattice_from_modulus(q)
        for shift in ((0.0, 0.0), (0.3, 0.7)):
            for B in (0.5, 1.0, 2.0):
                _, _, disc = poisson_two_sides(w, lat, shift, B, tol=1e-13)
                worst = max(worst, disc)
    ok &= _check("poisson gaussian / modulus lattices", worst, max(tol, 1e-10), lines)

    # Duality of best constants on random matrices.
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(3):
        C = rng.normal(size=(5, 7)) + 1j * rng.normal(size=(5, 7))
        c1, c2 = dual_constants(C)
        worst = max(worst, abs(c1 - c2) / max(c1, 1.0))
    ok &= _check("duality best constants", worst, tol, lines)

    # The two independent evaluations of T agree.
    fam = ModuliFamily(kind="squares", Q=4, associates=cfg.associates)
    a = make_coefficients("all_ones", 9)
    t1 = lhs_T(fam, a)
    t2 = lhs_T_vector(fam, a)
    ok &= _check("T exact-phase vs vector form", abs(t1 - t2) / max(t1, 1.0), tol, lines)

    # The three spacing counts are consistent.
    pts = farey_points(fam)
    ke, kn, ks = K_euclid(pts, 9), K_norm(pts, 9), K_sup(pts, 9)
    disc = float(abs(ke - kn) + max(ks - ke, 0))
    ok &= _check("K_euclid = K_norm >= K_sup", disc, 0.0, lines)

    # Three-way Weyl identity at k = 2.
    wc = WeylConfig(k=2, Q0=5.0, q1=GaussInt(2, 0), r1=GaussInt(1, 0), j=GaussInt(1, 1))
    s2 = abs(S_direct(wc)) ** 2
    d2 = abs(S2_squared_differenced(wc))
    p2 = abs(S2_squared_poisson(wc))
    rel = max(abs(s2 - d2), abs(s2 - p2)) / max(s2, 1e-30)
    ok &= _check("weyl |S|^2 three-way (k=2)", rel, max(tol, 1e-6), lines)

    # Closed-form transforms against quadrature.
    worst = 0.0
    fj = fejer(2)
    gw = g_and_hat_square(GaussInt(1, 1), 4.0)
    for pt in ((0.25, -0.5), (1.0, 0.75)):
        worst = max(worst, abs(fj.f_hat(pt) - numeric_fourier(fj, pt, tol=1e-7)))
        worst = max(worst, abs(gw.f_hat(pt) - numeric_fourier(gw, pt, tol=1e-8)))
    ok &= _check("transforms vs quadrature", worst, max(tol, 1e-6), lines)

    lines.append("all identities pass" if ok else "identity failures present")
    return (EXIT_OK if ok else EXIT_FAIL), lines


# ---------------------------------------------------------------------------
# sweep

SWEEP_COLUMNS = [
    "family", "k", "Q", "N", "seed", "R",
    "K_euclid", "K_sup", "K_norm", "T", "Z",
    "bound_huxley", "bound_thm1", "bound_thm2", "bound_conj", "bound_ls_explicit",
    "ratio_huxley", "ratio_thm1", "ratio_thm2", "ratio_conj", "ratio_ls_explicit",
    "status", "config_hash", "version",
]


def _sweep_cells(cfg: ExperimentConfig):
    labels = ["ones"] + [f"seed{n}" for n in cfg.seeds] + ["extremal"]
    for Q in cfg.Q:
        for N in cfg.N:
            for label in labels:
                yield Q, N, label


def _coeffs_for(label: str, N: int, fam: ModuliFamily):
    if label == "ones":
        return make_coefficients("all_ones", N)
    if label == "extremal":
        pairs = fam.moduli()
        q0, _ = pairs[-1] if pairs else (GaussInt(1, 0), GaussInt(1, 0))
        return make_coefficients("extremal", N, r0=GaussInt(1, 0), q0=q0, k=fam.power)
    return make_coefficients("random", N, seed=int(label[4:]))


def sweep_rows(cfg: ExperimentConfig) -> list[dict]:
    """One row per (Q, N, coefficient choice), in fixed column order."""
    cfg.validate()
    chash = cfg.hash()
    k = cfg.k if cfg.family == "power" else {"all": 1, "squares": 2}[cfg.family]
    rows = []
    kcache: dict[tuple[int, int], tuple[int, int, int, int]] = {}
    for Q, N, label in _sweep_cells(cfg):
        fam = ModuliFamily(kind=cfg.family, Q=Q, k=cfg.k, associates=cfg.associates)
        row = dict.fromkeys(SWEEP_COLUMNS, "")
        row.update(family=cfg.family, k=k, Q=Q, N=N, seed=label,
                   status="ok", config_hash=chash, version=__version__)
        try:
            if (Q, N) not in kcache:
                pts = farey_points(fam, budget=cfg.budget)
                kcache[Q, N] = (len(pts), K_euclid(pts, N), K_sup(pts, N), K_norm(pts, N))
            R, ke, ks, kn = kcache[Q, N]
            a = _coeffs_for(label, N, fam)
            T = lhs_T(fam, a, budget=cfg.budget)
            b = bounds(Q, N, a.Z, k=k, eps=cfg.eps)
            row.update(R=R, K_euclid=ke, K_sup=ks, K_norm=kn, T=T, Z=a.Z,
                       bound_huxley=b["huxley"], bound_thm1=b["thm1"],
                       bound_thm2=b["thm2"], bound_conj=b["conjecture"],
                       bound_ls_explicit=LS_CONSTANT * ke * N * a.Z)
            for key in ("huxley", "thm1", "thm2"):
                row[f"ratio_{key}"] = T / b[key]
            row["ratio_conj"] = T / b["conjecture"]
            row["ratio_ls_explicit"] = T / (LS_CONSTANT * ke * N * a.Z) if ke else float("inf")
        except BudgetExceededError:
            row["status"] = "skipped"
        rows.append(row)
    return rows


def cmd_sweep(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    cfg.validate()
    t0 = time.perf_counter()
    rows = sweep_rows(cfg)
    buf = io.StringIO()
    _emit(SWEEP_COLUMNS, rows, cfg, buf)
    out = _open_out(cfg)
    if out is not None:
        with out:
            out.write(buf.getvalue())
        lines = [f"wrote {len(rows)} rows to {cfg.out}"]
    else:
        lines = buf.getvalue().splitlines()
    print(f"sweep wall time {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    skipped = sum(1 for r in rows if r["status"] == "skipped")
    status = EXIT_BUDGET if skipped else EXIT_OK
    bad = [r for r in rows if r["status"] == "ok" and r["ratio_ls_explicit"] > 1 + cfg.tol]
    if bad:
        lines.append(f"{len(bad)} cells violate the explicit spacing bound")
        status = EXIT_FAIL
    return status, lines


# ---------------------------------------------------------------------------
# spacing / weyl / duality / report

SPACING_COLUMNS = ["family", "k", "Q", "N", "R", "K_euclid", "K_sup", "K_norm",
                   "status", "config_hash", "version"]


def cmd_spacing(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    """Tabulate the point counts and all three K formulations."""
    cfg.validate()
    chash = cfg.hash()
    rows = []
    status = EXIT_OK
    for Q in cfg.Q:
        fam = ModuliFamily(kind=cfg.family, Q=Q, k=cfg.k, associates=cfg.associates)
        try:
            pts = farey_points(fam, budget=cfg.budget)
        except BudgetExceededError:
            status = EXIT_BUDGET
            for N in cfg.N:
                rows.append(dict.fromkeys(SPACING_COLUMNS, "") | dict(
                    family=cfg.family, k=fam.power, Q=Q, N=N, status="skipped",
                    config_hash=chash, version=__version__))
            continue
        for N in cfg.N:
            ke, ks, kn = K_euclid(pts, N), K_sup(pts, N), K_norm(pts, N)
            rows.append(dict(family=cfg.family, k=fam.power, Q=Q, N=N, R=len(pts),
                             K_euclid=ke, K_sup=ks, K_norm=kn, status="ok",
                             config_hash=chash, version=__version__))
            if ke != kn or ks > ke:
                status = EXIT_FAIL
    buf = io.StringIO()
    _emit(SPACING_COLUMNS, rows, cfg, buf)
    out = _open_out(cfg)
    if out is not None:
        with out:
            out.write(buf.getvalue())
        return status, [f"wrote {len(rows)} rows to {cfg.out}"]
    return status, buf.getvalue().splitlines()


def _weyl_triples(Q0: float):
    """Three (q1, r1, j) choices with N(q1) in the dyadic window for k = 2."""
    lo = Q0 / math.sqrt(2.0)
    cands = []
    b = math.isqrt(int(Q0)) + 1
    for a1 in range(0, b + 1):
        for a2 in range(0, b + 1):
            n = a1 * a1 + a2 * a2
            if lo < n <= Q0 and a1 > 0:
                cands.append(GaussInt(a1, a2))
    cands.sort(key=lambda q: (q.norm(), q.re, q.im))
    out = []
    for q1, (r1, j) in zip(cands, [(GaussInt(1, 0), GaussInt(1, 0)),
                                   (GaussInt(1, 1), GaussInt(2, 1)),
                                   (GaussInt(2, 1), GaussInt(1, 2))]):
        if not gcd_is_unit(r1, q1):
            r1 = GaussInt(1, 0)
        out.append((q1, r1, j))
    while len(out) < 3 and cands:
        out.append((cands[0], GaussInt(1, 0), GaussInt(len(out) + 1, 0)))
    return out[:3]


def cmd_weyl(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    """Three-way |S|^2 identity check (k = 2) at each requested Q0."""
    cfg.validate()
    lines = [f"weyl identity  (config {cfg.hash()}, version {__version__})"]
    ok = True
    for Q0 in cfg.Q0:
        for q1, r1, j in _weyl_triples(float(Q0)):
            wc = WeylConfig(k=2, Q0=float(Q0), q1=q1, r1=r1, j=j)
            s2 = abs(S_direct(wc)) ** 2
            d2 = abs(S2_squared_differenced(wc))
            p2 = abs(S2_squared_poisson(wc))
            rel = max(abs(s2 - d2), abs(s2 - p2)) / max(s2, 1e-30)
            good = rel <= max(cfg.tol, 1e-6)
            ok &= good
            lines.append(
                f"{'PASS' if good else 'FAIL'}  Q0={Q0:<5g} q1={q1.re}+{q1.im}i "
                f"|S|^2={s2:.9g} rel_disc={rel:.3e}"
            )
    return (EXIT_OK if ok else EXIT_FAIL), lines


def dual_constants(C: np.ndarray, iters: int = 2000) -> tuple[float, float]:
    """Best constants of the two dual quadratic forms, via power iteration.

    Both equal the squared spectral norm of C; they are computed
    independently on C C* and C* C so agreement is a real check.
    """
    out = []
    for M in (C @ C.conj().T, C.conj().T @ C):
        n = M.shape[0]
        v = np.full(n, 1.0 / math.sqrt(n), dtype=complex)
        lam = 0.0
        for _ in range(iters):
            w = M @ v
            nrm = np.linalg.norm(w)
            if nrm == 0:
                break
            v = w / nrm
            new = float(np.real(np.vdot(v, M @ v)))
            if abs(new - lam) <= 1e-15 * max(new, 1.0):
                lam = new
                break
            lam = new
        out.append(lam)
    return out[0], out[1]


def cmd_duality(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    cfg.validate()
    rng = np.random.default_rng(cfg.seeds[0])
    lines = [f"duality check  (config {cfg.hash()}, version {__version__})"]
    ok = True
    for t in range(cfg.trials):
        m = int(rng.integers(1, 9))
        n = int(rng.integers(1, 13))
        C = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
        c1, c2 = dual_constants(C)
        rel = abs(c1 - c2) / max(c1, 1.0)
        good = rel <= max(cfg.tol, 1e-9)
        ok &= good
        lines.append(f"{'PASS' if good else 'FAIL'}  trial {t}: {m}x{n}  "
                     f"constants {c1:.12g} / {c2:.12g}  rel_disc={rel:.3e}")
    return (EXIT_OK if ok else EXIT_FAIL), lines


def cmd_report(cfg: ExperimentConfig) -> tuple[int, list[str]]:
    """Summarize a sweep: worst ratios per bound, including the conjectural one."""
    cfg.validate()
    rows = sweep_rows(cfg)
    done = [r for r in rows if r["status"] == "ok"]
    lines = [f"report  (config {cfg.hash()}, version {__version__})",
             f"cells: {len(done)} computed, {len(rows) - len(done)} skipped"]
    status = EXIT_OK if len(done) == len(rows) else EXIT_BUDGET
    for key in ("ratio_ls_explicit", "ratio_huxley", "ratio_thm1", "ratio_thm2"):
        vals = [r[key] for r in done]
        if vals:
            lines.append(f"max {key:<20s} = {max(vals):.6g}")
    conj = [r["ratio_conj"] for r in done]
    if conj:
        lines.append(f"max ratio_conj (not asserted) = {max(conj):.6g}")
    over = [r for r in done if r["ratio_ls_explicit"] > 1 + cfg.tol]
    if over:
        lines.append(f"{len(over)} cells exceed the explicit spacing bound")
        status = EXIT_FAIL
    return status, lines
