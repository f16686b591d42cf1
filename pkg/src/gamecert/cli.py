"""Command-line front end with reproducible file output.

Every run is driven by a flat ``key = value`` config file (dotted section
prefixes, ``#`` comments).  The same config always produces byte-identical
artifacts: floats are printed with 17 significant digits, key order is fixed,
and nothing timestamped ever enters an output file.

Exit status: 0 = certified / found / all checks passed, 2 = clean run whose
answer is "no" (infeasible parameters, empty candidate list, a verifier
counterexample, parameters outside the certified regime), 1 = bad usage or a
malformed config (reported with the offending field path).
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .certify import (
    Certificate,
    default_delta,
    dimension_certificate,
    distance_set_certificate,
    intersect_certificate,
    pattern_certificate,
)
from .core import DiagonalContraction, LogScalar
from .families import (
    RcdSpec,
    RcoSpec,
    covering_strategy_for_rcd,
    covering_strategy_for_rco,
    generate_rcd,
    generate_rco,
    rcd_alpha,
    rco_alpha,
)
from .gamesim import (
    child_cover_grid,
    constant_policy,
    play_game,
    potential_transfer_bound,
    steering_policy,
    tuple_overlap_bound,
    verify_covering_budget,
    verify_half_shrink,
    verify_projection_return,
)
from .optimize import (
    DEFAULT_CONFIG,
    SMALLEST_U_CONFIG,
    SearchConfig,
    SearchResult,
    optimize_dimension,
    optimize_intersection,
    optimize_pattern_count,
    smallest_u_for_patterns,
)
from .patterns import PatternQuery, candidates_to_csv, find_homothety

COMMANDS = (
    "certify",
    "maximize",
    "intersect",
    "generate",
    "simulate",
    "verify",
    "find-pattern",
    "smallest-u",
)
THREADS_ENV = "GAMECERT_THREADS"
_REQUIRED = object()


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


class ConfigError(Exception):
    """Config problem tied to one field path."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class Config:
    """Flat key = value pairs with dotted section names."""

    def __init__(self, pairs: dict[str, str], source: str) -> None:
        self.pairs = pairs
        self.source = source
        self._seen: set[str] = set()

    @classmethod
    def load(cls, path: str) -> "Config":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path!r}: {exc}") from exc
        pairs: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.strip()
            if not body or body.startswith("#"):
                continue
            key, eq, raw = body.partition("=")
            if not eq:
                raise ConfigError(f"{path}:{lineno}", f"expected 'key = value', got {line!r}")
            key = key.strip()
            if key in pairs:
                raise ConfigError(key, "duplicate key")
            pairs[key] = raw.strip()
        return cls(pairs, path)

    def has(self, key: str) -> bool:
        return key in self.pairs

    def raw(self, key: str, default: object = _REQUIRED) -> str | object:
        if key in self.pairs:
            self._seen.add(key)
            return self.pairs[key]
        if default is _REQUIRED:
            raise ConfigError(key, "required key is missing")
        return default

    def get_str(self, key: str, default: object = _REQUIRED, *,
                choices: Sequence[str] | None = None) -> str:
        value = self.raw(key, default)
        if not isinstance(value, str):
            return value  # the default, passed through untyped
        if choices and value not in choices:
            raise ConfigError(key, f"expected one of {'|'.join(choices)}, got {value!r}")
        return value

    def get_int(self, key: str, default: object = _REQUIRED, *,
                lo: int | None = None, hi: int | None = None) -> int:
        value = self.raw(key, default)
        if isinstance(value, str):
            try:
                value = int(value, 0)
            except ValueError:
                raise ConfigError(key, f"expected an integer, got {self.pairs[key]!r}") from None
        if value is None:
            return value
        if lo is not None and value < lo:
            raise ConfigError(key, f"must be >= {lo}, got {value}")
        if hi is not None and value > hi:
            raise ConfigError(key, f"must be <= {hi}, got {value}")
        return value

    def get_float(self, key: str, default: object = _REQUIRED, *,
                  lo: float | None = None, hi: float | None = None,
                  open_ends: bool = False) -> float:
        value = self.raw(key, default)
        if isinstance(value, str):
            try:
                value = float(Fraction(value)) if "/" in value else float(value)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(key, f"expected a number, got {self.pairs[key]!r}") from None
        if value is None:
            return value
        if lo is not None and (value <= lo if open_ends else value < lo):
            raise ConfigError(key, f"must be {'>' if open_ends else '>='} {lo}, got {value!r}")
        if hi is not None and (value >= hi if open_ends else value > hi):
            raise ConfigError(key, f"must be {'<' if open_ends else '<='} {hi}, got {value!r}")
        return value

    def get_bool(self, key: str, default: object = _REQUIRED) -> bool:
        value = self.raw(key, default)
        if not isinstance(value, str):
            return value
        if value in ("true", "yes", "1"):
            return True
        if value in ("false", "no", "0"):
            return False
        raise ConfigError(key, f"expected true|false, got {value!r}")

    def get_fraction(self, key: str, default: object = _REQUIRED, *,
                     positive: bool = False) -> Fraction:
        value = self.raw(key, default)
        if isinstance(value, str):
            try:
                value = Fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(key, f"expected a rational p/q, got {self.pairs[key]!r}") from None
        if value is None:
            return value
        if positive and value <= 0:
            raise ConfigError(key, f"must be positive, got {value}")
        return value

    def get_int_list(self, key: str, default: object = _REQUIRED) -> tuple[int, ...]:
        value = self.raw(key, default)
        if not isinstance(value, str):
            return value
        try:
            return tuple(int(part.strip()) for part in value.split(","))
        except ValueError:
            raise ConfigError(key, f"expected comma-separated integers, got {value!r}") from None

    def get_points(self, key: str, default: object = _REQUIRED) -> tuple[tuple[Fraction, Fraction], ...]:
        """'x,y; x,y; ...' with exact rational coordinates."""
        value = self.raw(key, default)
        if not isinstance(value, str):
            return value
        points = []
        for chunk in value.split(";"):
            parts = [p.strip() for p in chunk.split(",")]
            if len(parts) != 2:
                raise ConfigError(key, f"expected 'x,y' pairs separated by ';', got {chunk.strip()!r}")
            try:
                points.append((Fraction(parts[0]), Fraction(parts[1])))
            except (ValueError, ZeroDivisionError):
                raise ConfigError(key, f"bad rational coordinate in {chunk.strip()!r}") from None
        return tuple(points)

    def reject_unknown(self, known_prefixes: Sequence[str]) -> None:
        for key in sorted(self.pairs):
            if key in self._seen:
                continue
            if any(key == p or key.startswith(p + ".") for p in known_prefixes):
                raise ConfigError(key, "key was not consumed by this command (misplaced or misspelled)")
            raise ConfigError(key, "unknown key")


# --------------------------------------------------------------- family block


def _family_from(cfg: Config, prefix: str = "family") -> RcoSpec | RcdSpec:
    kind = cfg.get_str(f"{prefix}.kind", choices=("rco", "rcd"))
    u = cfg.get_int(f"{prefix}.u", lo=2)
    v = cfg.get_int(f"{prefix}.v", lo=2)
    try:
        if kind == "rco":
            return RcoSpec(u, v, cfg.get_int(f"{prefix}.m", 1, lo=1),
                           cfg.get_int(f"{prefix}.t", 1, lo=1))
        rule = cfg.get_str(f"{prefix}.corner_rule", "fixed", choices=("fixed", "hash"))
        return RcdSpec(u, v, rule, cfg.get_int(f"{prefix}.corner_seed", 0))
    except ValueError as exc:
        raise ConfigError(prefix, str(exc)) from None


def _raw_contraction(cfg: Config, key: str = "family.betas") -> DiagonalContraction:
    raw = cfg.raw(key)
    parts = [p.strip() for p in raw.split(",")]
    try:
        if all("/" in p for p in parts):
            fracs = [Fraction(p) for p in parts]
            if all(f.numerator == 1 for f in fracs):
                return DiagonalContraction.from_denominators(
                    tuple(f.denominator for f in fracs))
            return DiagonalContraction(tuple(float(f) for f in fracs))
        return DiagonalContraction(tuple(float(p) for p in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(key, f"bad contraction ratio list {raw!r}: {exc}") from None


def _alpha_for(cfg: Config, family: RcoSpec | RcdSpec | None, c: float) -> LogScalar:
    if family is None:
        if cfg.has("family.alpha_log"):
            return LogScalar(cfg.get_float("family.alpha_log", hi=0.0, open_ends=True))
        return LogScalar.from_value(
            cfg.get_float("family.alpha", lo=0.0, hi=1.0, open_ends=True))
    if isinstance(family, RcoSpec):
        return rco_alpha(family.u, family.v, family.m, family.t, c)
    t = cfg.get_float("game.t", lo=0.0, open_ends=True)
    return rcd_alpha(family.u, family.v, c, t)


def _family_echo(family: RcoSpec | RcdSpec) -> dict[str, str]:
    if isinstance(family, RcoSpec):
        return {"family.kind": "cutout", "family.u": str(family.u),
                "family.v": str(family.v), "family.m": str(family.m),
                "family.t": str(family.t)}
    return {"family.kind": "corner", "family.u": str(family.u),
            "family.v": str(family.v)}


# ------------------------------------------------------------------ artifacts


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    print(f"wrote {path}")
    return path


def _search_text(result: SearchResult) -> str:
    rows: list[tuple[str, object]] = [
        ("schema", "gamecert.search.v1"),
        ("kind", result.kind),
        ("feasible", result.feasible),
        ("pattern_count", result.pattern_count),
        ("c", result.c),
        ("t", result.t),
        ("delta", result.delta),
        ("free_steps", result.free_steps),
        ("alpha_log", result.alpha_log),
        ("dim_bound", result.dim_bound),
        ("dim_bound_combined", result.dim_bound_combined),
        ("probes", result.probes),
    ]
    return "\n".join(f"{k} = {_fmt(v)}" for k, v in rows if v is not None) + "\n"


def _search_config(cfg: Config, base: SearchConfig, threads: int,
                   trace_path: str | None) -> SearchConfig:
    fields = dict(
        c_count=cfg.get_int("optimizer.c_count", base.c_count, lo=2),
        c_s_lo=cfg.get_float("optimizer.c_s_lo", base.c_s_lo, lo=0.0, hi=1.0, open_ends=True),
        c_s_hi=cfg.get_float("optimizer.c_s_hi", base.c_s_hi, lo=0.0, hi=1.0, open_ends=True),
        refine_passes=cfg.get_int("optimizer.refine_passes", base.refine_passes, lo=0),
        refine_points=cfg.get_int("optimizer.refine_points", base.refine_points, lo=3),
        delta_samples=cfg.get_int("optimizer.delta_samples", base.delta_samples, lo=1),
        t_lo=cfg.get_float("optimizer.t_lo", base.t_lo, lo=0.0, open_ends=True),
        t_hi=cfg.get_float("optimizer.t_hi", base.t_hi, lo=0.0, open_ends=True),
        t_step=cfg.get_float("optimizer.t_step", base.t_step, lo=0.0, open_ends=True),
        pattern_cap=cfg.get_int("optimizer.pattern_cap", base.pattern_cap, lo=1),
        threads=threads,
        trace_path=trace_path,
    )
    if fields["c_s_lo"] >= fields["c_s_hi"]:
        raise ConfigError("optimizer.c_s_lo", "must be below optimizer.c_s_hi")
    return replace(base, **fields)


# ------------------------------------------------------------------- commands


def _cmd_certify(cfg: Config, out: Path, threads: int, trace: bool,
                 finish: Callable[[], None]) -> int:
    if cfg.has("certify.certificate"):
        return _revalidate(cfg, out, finish)
    kind = cfg.get_str("certify.kind", "dimension",
                       choices=("dimension", "pattern", "distance"))
    family_kind = cfg.get_str("family.kind", choices=("rco", "rcd", "raw"))
    if family_kind == "raw":
        family = None
        contraction = _raw_contraction(cfg)
    else:
        family = _family_from(cfg)
        contraction = family.contraction()
    c = cfg.get_float("game.c", lo=0.0, hi=1.0, open_ends=True)
    rho2 = cfg.get_float("game.rho2", 1.0, lo=0.0, open_ends=True)
    count = cfg.get_int("game.pattern_count", lo=1) if kind == "pattern" else None
    alpha = _alpha_for(cfg, family, c)
    delta = cfg.get_float("game.delta", None, lo=0.0, open_ends=True)
    finish()
    try:
        if delta is None:
            delta = default_delta(contraction)
        extras = _family_echo(family) if family else {
            "betas": ",".join("%.17g" % b for b in contraction.betas)}
        if kind == "dimension":
            cert = dimension_certificate(alpha, contraction, c, delta, rho2, extras)
        elif kind == "pattern":
            cert = pattern_certificate(alpha, contraction, c, delta, count, rho2, extras)
        else:
            cert = distance_set_certificate(alpha, contraction, c, delta, rho2, extras)
    except ValueError as exc:
        print(f"not certified: theorem-ineligible ({exc})")
        return 2
    _write(out, "certificate.txt", cert.to_text())
    if not cert.fields.get("feasible"):
        print("not certified: feasibility conditions fail at these parameters")
        return 2
    print(f"certified: kind={cert.kind} dim_lower_bound="
          f"{_fmt(cert.fields.get('dim_lower_bound'))}")
    return 0


def _recertify(cert: Certificate) -> Certificate:
    """Recompute a certificate from its own stated parameters."""
    extras = cert.extras
    if "family.u" in extras:
        contraction = DiagonalContraction.from_denominators(
            (int(extras["family.u"]), int(extras["family.v"])))
    elif "betas" in extras:
        contraction = DiagonalContraction(
            tuple(float(b) for b in extras["betas"].split(",")))
    else:
        raise ValueError("certificate carries neither a family echo nor a betas list")
    c = cert.fields["c"]
    delta = cert.fields["delta"]
    rho2 = cert.fields.get("rho2", 1.0)
    if cert.kind == "intersection":
        count = int(extras["member_count"])
        alphas = [LogScalar(float(extras[f"member.{i}.alpha_log"]))
                  for i in range(1, count + 1)]
        fresh = intersect_certificate(alphas, contraction, c, delta, rho2)
    else:
        alpha = LogScalar(cert.fields["alpha_log"])
        if cert.kind == "dimension":
            fresh = dimension_certificate(alpha, contraction, c, delta, rho2)
        elif cert.kind == "pattern":
            fresh = pattern_certificate(alpha, contraction, c, delta,
                                        cert.fields["pattern_count"], rho2)
        elif cert.kind == "distance":
            fresh = distance_set_certificate(alpha, contraction, c, delta, rho2)
        else:
            raise ValueError(f"unknown certificate kind {cert.kind!r}")
    if "t" in cert.fields:
        fresh.fields.setdefault("t", cert.fields["t"])
    return Certificate(fresh.kind, fresh.fields, dict(cert.extras))


def _revalidate(cfg: Config, out: Path, finish: Callable[[], None]) -> int:
    path = cfg.get_str("certify.certificate")
    finish()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("certify.certificate", f"cannot read {path!r}: {exc}") from exc
    try:
        cert = Certificate.from_text(text)
        fresh = _recertify(cert)
    except (ValueError, KeyError) as exc:
        print(f"certificate does not re-validate: {exc}")
        return 2
    if fresh.to_text() != text:
        print("certificate does not re-validate: recomputation differs")
        for old, new in zip(text.splitlines(), fresh.to_text().splitlines()):
            if old != new:
                print(f"  stated:     {old}")
                print(f"  recomputed: {new}")
                break
        return 2
    if not cert.fields.get("feasible"):
        print("certificate re-validates but records an infeasible run")
        return 2
    print(f"certificate re-validates: kind={cert.kind} "
          f"dim_lower_bound={_fmt(cert.fields.get('dim_lower_bound'))}")
    return 0


def _cmd_maximize(cfg: Config, out: Path, threads: int, trace: bool,
                  finish: Callable[[], None]) -> int:
    family = _family_from(cfg)
    objective = cfg.get_str("maximize.objective", "pattern-count",
                            choices=("pattern-count", "dimension"))
    trace_path = str(out / "trace.txt") if trace else None
    search = _search_config(cfg, DEFAULT_CONFIG, threads, trace_path)
    rho2 = cfg.get_float("game.rho2", 1.0, lo=0.0, open_ends=True)
    finish()
    if trace:
        out.mkdir(parents=True, exist_ok=True)
    if objective == "pattern-count":
        result = optimize_pattern_count(family, search, rho2)
    else:
        result = optimize_dimension(family, search, rho2)
    _write(out, "search.txt", _search_text(result))
    if result.certificate is not None:
        _write(out, "certificate.txt", result.certificate.to_text())
    if trace_path:
        print(f"wrote {trace_path}")
    if not result.feasible:
        print("not certified: no feasible parameters found in the search region")
        return 2
    print(f"certified: pattern_count={result.pattern_count} "
          f"dim_bound={_fmt(result.dim_bound)}")
    return 0


def _cmd_intersect(cfg: Config, out: Path, threads: int, trace: bool,
                   finish: Callable[[], None]) -> int:
    members: list[RcoSpec | RcdSpec] = []
    i = 1
    while cfg.has(f"member.{i}.kind"):
        members.append(_family_from(cfg, prefix=f"member.{i}"))
        i += 1
    if not members:
        raise ConfigError("member.1.kind", "required key is missing")
    want_patterns = cfg.get_bool("intersect.want_patterns", False)
    trace_path = str(out / "trace.txt") if trace else None
    search = _search_config(cfg, DEFAULT_CONFIG, threads, trace_path)
    rho2 = cfg.get_float("game.rho2", 1.0, lo=0.0, open_ends=True)
    finish()
    if trace:
        out.mkdir(parents=True, exist_ok=True)
    try:
        result = optimize_intersection(members, search, want_patterns, rho2)
    except ValueError as exc:
        raise ConfigError("member", str(exc)) from None
    _write(out, "search.txt", _search_text(result))
    if result.certificate is not None:
        _write(out, "certificate.txt", result.certificate.to_text())
    if not result.feasible:
        print("not certified: combined deletion rate stays above the threshold")
        return 2
    print(f"certified: members={len(members)} dim_bound={_fmt(result.dim_bound)}")
    return 0


def _read_generate(cfg: Config, default_depth: int | None = None) -> tuple:
    family = _family_from(cfg)
    if default_depth is None:
        depth = cfg.get_int("generate.depth", lo=1)
    else:
        depth = cfg.get_int("generate.depth", default_depth, lo=1)
    placement, seed = "corner", 0
    if isinstance(family, RcoSpec):
        placement = cfg.get_str("generate.placement", "corner",
                                choices=("corner", "hash"))
        seed = cfg.get_int("generate.seed", 0)
    return family, depth, placement, seed


def _build_rect(family, depth: int, placement: str, seed: int):
    try:
        if isinstance(family, RcoSpec):
            return generate_rco(family, depth, placement, seed)
        return generate_rcd(family, depth)
    except (ValueError, OverflowError) as exc:
        raise ConfigError("generate.depth", str(exc)) from None


def _cmd_generate(cfg: Config, out: Path, threads: int, trace: bool,
                  finish: Callable[[], None]) -> int:
    params = _read_generate(cfg)
    formats = [f.strip() for f in cfg.get_str("generate.format", "csv").split(",")]
    for fmt in formats:
        if fmt not in ("csv", "pbm"):
            raise ConfigError("generate.format", f"expected csv|pbm, got {fmt!r}")
    width = cfg.get_int("generate.width", 256, lo=8)
    height = cfg.get_int("generate.height", 256, lo=8)
    finish()
    rect = _build_rect(*params)
    if "csv" in formats:
        _write(out, "rectangles.csv", rect.to_csv())
    if "pbm" in formats:
        _write(out, "raster.pbm", rect.to_pbm(width, height))
    print(f"generated {len(rect.entries)} boxes to level {rect.max_level()}")
    return 0


def _cmd_simulate(cfg: Config, out: Path, threads: int, trace: bool,
                  finish: Callable[[], None]) -> int:
    family, depth, placement, seed = _read_generate(
        cfg, default_depth=cfg.get_int("simulate.moves", lo=1))
    moves = cfg.get_int("simulate.moves", lo=1)
    c = cfg.get_float("game.c", lo=0.0, hi=1.0, open_ends=True)
    t = cfg.get_int("game.t", lo=1) if isinstance(family, RcdSpec) else None
    policy_name = cfg.get_str("simulate.policy", "steer", choices=("steer", "center"))
    if policy_name == "steer":
        target = cfg.get_points("simulate.target")
        if len(target) != 1:
            raise ConfigError("simulate.target", "expected a single 'x,y' point")
        policy = steering_policy(target[0])
    else:
        policy = constant_policy((Fraction(0), Fraction(0)))
    radius = cfg.get_fraction("simulate.radius", Fraction(1), positive=True)
    clamp = cfg.get_bool("simulate.clamp", True)
    preamble = cfg.get_bool("simulate.preamble", True)
    finish()
    try:
        if isinstance(family, RcoSpec):
            member = generate_rco(family, depth, placement, seed)
            strategy = covering_strategy_for_rco(member, c)
        else:
            strategy = covering_strategy_for_rcd(family, c, t, depth)
    except (ValueError, OverflowError) as exc:
        raise ConfigError("family", str(exc)) from None
    try:
        transcript = play_game(policy, strategy, moves, radius=radius,
                               grant_preamble=preamble, clamp=clamp)
    except ValueError as exc:
        print(f"error: simulate: {exc}", file=sys.stderr)
        return 1
    _write(out, "transcript.txt", transcript.to_text())
    outcome = transcript.outcome_box
    deleted = transcript.outcome_intersects_deleted() is not None
    skips = sum(1 for mv in transcript.moves if mv.skipped)
    print(f"played {moves} moves: outcome center = "
          f"{','.join(_fmt(x) for x in outcome.center)}, "
          f"touches deleted region = {_fmt(deleted)}, skipped answers = {skips}")
    return 0


def _verify_report(cfg: Config, threads: int,
                   finish: Callable[[], None]) -> tuple[str, bool]:
    check = cfg.get_str("verify.check", choices=(
        "projection", "half-shrink", "budget", "child-grid", "overlap", "transfer"))
    lines = [f"schema = gamecert.verify.v1", f"check = {check}"]
    ok = True
    if check == "projection":
        us = cfg.get_int_list("verify.u")
        block = cfg.get_int("verify.block", lo=1)
        k = cfg.get_int("verify.k", 0, lo=0)
        radius = cfg.get_int("verify.radius", 50, lo=1)
        corrupt = cfg.get_bool("verify.corrupt", False)
        finish()
        try:
            audit = verify_projection_return(us, block, k=k, radius=radius,
                                             coarse_branch=not corrupt)
        except ValueError as exc:
            raise ConfigError("verify.u", str(exc)) from None
        lines += [f"u = {','.join(map(str, us))}", f"block = {block}",
                  f"k = {k}", f"radius = {radius}",
                  f"checked = {audit.checked}", f"failures = {audit.failures}"]
        if audit.witness is not None:
            lines.append(f"witness = {audit.witness}")
        ok = audit.passed
    elif check == "half-shrink":
        us = cfg.get_int_list("verify.u")
        block = cfg.get_int("verify.block", lo=1)
        level = cfg.get_int("verify.level", lo=2)
        radius = cfg.get_int("verify.radius", 50, lo=1)
        finish()
        try:
            audit = verify_half_shrink(us, level, block, radius=radius)
        except ValueError as exc:
            raise ConfigError("verify.level", str(exc)) from None
        lines += [f"u = {','.join(map(str, us))}", f"block = {block}",
                  f"level = {level}", f"radius = {radius}",
                  f"checked = {audit.checked}", f"failures = {audit.failures}"]
        ok = audit.passed
    elif check == "budget":
        family, depth, placement, seed = _read_generate(cfg, default_depth=2)
        c = cfg.get_float("game.c", lo=0.0, hi=1.0, open_ends=True)
        t = cfg.get_int("game.t", lo=1) if isinstance(family, RcdSpec) else None
        levels = cfg.get_int_list("verify.levels", None)
        extent = cfg.get_int("verify.extent", 1, lo=1)
        finish()
        try:
            if isinstance(family, RcoSpec):
                member = generate_rco(family, depth, placement, seed)
                strategy = covering_strategy_for_rco(member, c)
            else:
                strategy = covering_strategy_for_rcd(family, c, t, depth)
            audit = verify_covering_budget(strategy, levels=levels, extent=extent)
        except (ValueError, OverflowError) as exc:
            raise ConfigError("verify", str(exc)) from None
        for rep in audit.levels:
            lines.append(f"level.{rep.level}.boxes = {rep.strategy_boxes}")
            lines.append(f"level.{rep.level}.test_boxes = {rep.test_boxes}")
            lines.append(f"level.{rep.level}.worst_hits = {rep.worst_hits}")
            lines.append(f"level.{rep.level}.legal = {_fmt(rep.legal)}")
        lines.append(f"worst_hits = {audit.worst_hits}")
        ok = audit.all_legal
    elif check == "child-grid":
        us = cfg.get_int_list("verify.u")
        block = cfg.get_int("verify.block", lo=1)
        parent = cfg.get_int_list("verify.parent", tuple(0 for _ in us))
        k = cfg.get_int("verify.k", 0, lo=0)
        if len(parent) != len(us):
            raise ConfigError("verify.parent", "length must match verify.u")
        finish()
        report = child_cover_grid(us, block, parent, k=k)
        lines += [f"u = {','.join(map(str, us))}", f"block = {block}",
                  f"count = {report.count}",
                  f"formula_count = {report.formula_count}",
                  f"floor_product = {report.floor_product}",
                  f"all_inside_half_parent = {_fmt(report.all_inside_half_parent)}",
                  f"matches_enumeration = {_fmt(report.matches_enumeration)}"]
        ok = (report.matches_enumeration and report.all_inside_half_parent
              and report.count >= report.floor_product)
    elif check == "overlap":
        us = cfg.get_int_list("verify.u")
        level = cfg.get_int("verify.level", lo=1)
        exponent = cfg.get_int("verify.exponent", lo=1)
        center = cfg.get_points("verify.center", ((Fraction(0), Fraction(0)),))[0]
        if len(us) != 2:
            raise ConfigError("verify.u", "overlap check is two-dimensional: give two ratios")
        finish()
        report = tuple_overlap_bound(us, level, exponent, center)
        lines += [f"u = {','.join(map(str, us))}", f"level = {level}",
                  f"exponent = {exponent}", f"count = {report.exact_count}",
                  f"bound = {_fmt(report.bound)}",
                  f"dominated = {_fmt(report.ok)}"]
        ok = report.ok
    else:  # transfer
        samples = cfg.get_int("verify.samples", 1000, lo=1)
        seed = cfg.get_int("verify.seed", 0)
        finish()
        rnd = random.Random(seed)
        worst = 0.0
        failures = 0
        witness = None
        for _ in range(samples):
            x = rnd.uniform(1e-6, 10.0)
            y = rnd.uniform(1e-6, 10.0)
            a = rnd.uniform(0.0, 5.0)
            b = rnd.uniform(0.0, 5.0)
            gamma = rnd.uniform(1e-3, 4.0)
            cc = rnd.uniform(1e-3, 1 - 1e-3)
            lhs, rhs = potential_transfer_bound(x, y, a, b, gamma, cc)
            if lhs > rhs * (1 + 1e-12):
                failures += 1
                if witness is None:
                    witness = (x, y, a, b, gamma, cc)
            if rhs > 0:
                worst = max(worst, lhs / rhs)
        lines += [f"samples = {samples}", f"seed = {seed}",
                  f"failures = {failures}", f"worst_ratio = {_fmt(worst)}"]
        if witness is not None:
            lines.append("witness = " + ",".join(_fmt(w) for w in witness))
        ok = failures == 0
    lines.append(f"status = {'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n", ok


def _cmd_verify(cfg: Config, out: Path, threads: int, trace: bool,
                finish: Callable[[], None]) -> int:
    text, ok = _verify_report(cfg, threads, finish)
    _write(out, "report.txt", text)
    print("all checks passed" if ok else "counterexample found (see report)")
    return 0 if ok else 2


def _cmd_find_pattern(cfg: Config, out: Path, threads: int, trace: bool,
                      finish: Callable[[], None]) -> int:
    params = _read_generate(cfg)
    points = cfg.get_points("pattern.points")
    lam_lo = cfg.get_fraction("pattern.lambda_lo", positive=True)
    lam_hi = cfg.get_fraction("pattern.lambda_hi", lam_lo, positive=True)
    depth = cfg.get_int("pattern.depth", params[1], lo=0)
    resolution = cfg.get_fraction("pattern.resolution", None, positive=True)
    finish()
    rect = _build_rect(*params)
    try:
        query = PatternQuery(points, lam_lo, lam_hi, depth, resolution)
        candidates = find_homothety(query, rect, threads=threads)
    except ValueError as exc:
        raise ConfigError("pattern", str(exc)) from None
    _write(out, "candidates.csv", candidates_to_csv(candidates))
    if not candidates:
        print("no depth-consistent candidates on the scan grid")
        return 2
    best = max(c.max_depth_passed for c in candidates)
    print(f"found {len(candidates)} candidates (max depth passed = {best})")
    return 0


def _cmd_smallest_u(cfg: Config, out: Path, threads: int, trace: bool,
                    finish: Callable[[], None]) -> int:
    count = cfg.get_int("smallest.pattern_count", lo=1)
    gap = cfg.get_int("smallest.gap", 0, lo=0)
    trace_path = str(out / "trace.txt") if trace else None
    search = _search_config(cfg, SMALLEST_U_CONFIG, threads, trace_path)
    finish()
    if trace:
        out.mkdir(parents=True, exist_ok=True)
    try:
        answer = smallest_u_for_patterns(count, gap, search)
    except (ValueError, RuntimeError) as exc:
        raise ConfigError("smallest", str(exc)) from None
    rows = [
        ("schema", "gamecert.smallest-u.v1"),
        ("pattern_count", count),
        ("gap", gap),
        ("u", answer.u),
        ("u_pattern_count", answer.result.pattern_count),
        ("below_pattern_count", answer.below.pattern_count),
        ("probes", answer.probes),
    ]
    _write(out, "smallest.txt",
           "\n".join(f"{k} = {_fmt(v)}" for k, v in rows) + "\n")
    _write(out, "search.txt", _search_text(answer.result))
    if answer.result.certificate is not None:
        _write(out, "certificate.txt", answer.result.certificate.to_text())
    print(f"smallest u = {answer.u} (the value below, {answer.u - 1}, "
          f"certifies only {answer.below.pattern_count})")
    return 0


_DISPATCH: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "certify": (_cmd_certify, ("certify", "family", "game")),
    "maximize": (_cmd_maximize, ("maximize", "family", "game", "optimizer")),
    "intersect": (_cmd_intersect, ("intersect", "member", "game", "optimizer")),
    "generate": (_cmd_generate, ("generate", "family")),
    "simulate": (_cmd_simulate, ("simulate", "generate", "family", "game")),
    "verify": (_cmd_verify, ("verify", "generate", "family", "game")),
    "find-pattern": (_cmd_find_pattern, ("pattern", "generate", "family")),
    "smallest-u": (_cmd_smallest_u, ("smallest", "optimizer")),
}


def _resolve_threads(flag: int | None, cfg: Config) -> int:
    if flag is not None:
        return flag
    if cfg.has("optimizer.threads"):
        return cfg.get_int("optimizer.threads", lo=1)
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(THREADS_ENV, f"expected an integer, got {env!r}") from None
    return 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gamecert",
        description="certify and explore winning parameters of the box-deletion game",
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="action to run (may also live in the config as 'command')")
    parser.add_argument("--config", required=True, metavar="PATH",
                        help="flat key = value config file")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="directory for output artifacts (default: current)")
    parser.add_argument("--threads", type=int, default=None, metavar="K",
                        help=f"worker threads (default: ${THREADS_ENV} or 1)")
    parser.add_argument("--trace", action="store_true",
                        help="write the optimizer probe trace next to the artifacts")
    args = parser.parse_args(argv)
    try:
        cfg = Config.load(args.config)
        command = args.command
        if cfg.has("command"):
            configured = cfg.get_str("command", choices=COMMANDS)
            if command is None:
                command = configured
            elif command != configured:
                raise ConfigError("command",
                                  f"config says {configured!r} but the command line says {command!r}")
        if command is None:
            raise ConfigError("command", "no command given (argument or config key)")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        threads = _resolve_threads(args.threads, cfg)
        handler, prefixes = _DISPATCH[command]
        return handler(cfg, Path(args.out), threads, args.trace,
                       lambda: cfg.reject_unknown(prefixes))
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
