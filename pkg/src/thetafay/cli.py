"""Command-line driver: ``thetafay <group|rep|fay|theta|verify> <action> [flags]``.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .chargeom import Characteristic, Parity, characteristics, count, odd_base
from .fayops import (
    build_fay,
    commutation_check,
    distinguished_vectors,
    w_plus_vector,
    exact_eigenspaces,
    expected_dims,
    is_eigenvector,
    quadratic_relation_holds,
)
from .indrep import character_norm
from .relcheck import (
    genus1_nonvanishing,
    kernel_matches_vplus,
    phi_display_check,
    rank_gradient_span,
    rank_theta_powers,
    translation_character_separation,
    verify_vplus_relations,
    verify_wminus_relations,
)
from .symgroup import (
    double_coset_count,
    enumerate_group,
    generators,
    random_element,
    sp_order,
    transitivity_report,
)
from .chargeom import affine_action, epsilon, pairing_e
from .thetanum import (
    DEFAULT_TOL,
    check_transformation_4th,
    integer_generators,
    sample_points,
    theta_nullwert,
)

SCHEMA_VERSION = 1
MAX_EXACT_GENUS = 4
MAX_NUMERIC_GENUS = 3
MAX_ENUM_GENUS = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    action: str
    g: int
    seed: int = 0
    tol: float | None = None
    samples: int | None = None
    sector: str = "even"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = {"command": self.command, "action": self.action, "g": self.g, "seed": self.seed,
             "tol": self.tol, "samples": self.samples, "sector": self.sector}
        d.update(self.extra)
        return d


# ---------------------------------------------------------------------------
# verification battery


def _check(tag: str, name: str, fn: Callable[[], tuple[bool, dict]]) -> dict:
    t0 = time.perf_counter()
    ok, evidence = fn()
    return {"tag": tag, "name": name, "status": "pass" if ok else "fail",
            "evidence": evidence, "wall_time": round(time.perf_counter() - t0, 3)}


def _skipped(tag: str, name: str, reason: str) -> dict:
    return {"tag": tag, "name": name, "status": "skipped", "evidence": {"reason": reason},
            "wall_time": 0.0}


def _fay_check(g: int, sector: Parity, seed: int) -> tuple[bool, dict]:
    M = build_fay(g, sector)
    V, W = exact_eigenspaces(M)
    tag = "+" if sector is Parity.EVEN else "-"
    exp = expected_dims(g)
    evidence = {
        "eigenvalues": list(M.eigenvalues()),
        "dim_V": V.dim, "dim_W": W.dim,
        "expected_dim_V": exp["V" + tag], "expected_dim_W": exp["W" + tag],
        "quadratic_relation": quadratic_relation_holds(M),
        "commutes_with_generators": all(commutation_check(s, M) for s in generators(g)),
    }
    rng = np.random.default_rng(seed)
    evidence["commutes_with_random_words"] = all(
        commutation_check(random_element(g, rng), M) for _ in range(10))
    ok = (V.dim == exp["V" + tag] and W.dim == exp["W" + tag] and evidence["quadratic_relation"]
          and evidence["commutes_with_generators"] and evidence["commutes_with_random_words"])
    if sector is Parity.EVEN:
        u_v, u_w = distinguished_vectors(g)
        lam_v, lam_w = M.eigenvalues()
        evidence["distinguished_in_V"] = is_eigenvector(M, u_v, lam_v)
        evidence["wplus_vector_in_W"] = is_eigenvector(M, w_plus_vector(g), lam_w)
        # reported only; this vector is not an eigenvector for any g
        evidence["leading_2g_plus_1_vector_in_W"] = is_eigenvector(M, u_w, lam_w)
        ok = ok and evidence["distinguished_in_V"] and evidence["wplus_vector_in_W"]
    return ok, evidence


def _cocycle_violations(g: int, seed: int, trials: int = 2000) -> int:
    rng = np.random.default_rng(seed)
    chars = characteristics(g)
    bad = 0
    for _ in range(trials):
        s, t = random_element(g, rng), random_element(g, rng)
        m = chars[rng.integers(len(chars))]
        n = chars[rng.integers(len(chars))]
        sm = affine_action(s, m)
        bad += affine_action(t @ s, m) != affine_action(t, sm)
        bad += epsilon(t @ s, m) != epsilon(s, m) * epsilon(t, sm)
        bad += pairing_e(sm, affine_action(s, n)) != pairing_e(m, n) * epsilon(s, m) * epsilon(s, n)
    return bad


def _frame_check(g: int, sector: Parity, seed: int) -> tuple[bool, dict]:
    exp = expected_dims(g)
    tag = "+" if sector is Parity.EVEN else "-"
    # one component per nonzero eigenspace of Fay's operator
    components = (exp["V" + tag] > 0) + (exp["W" + tag] > 0)
    enum = enumerate_group(g)
    base = Characteristic.zero(g) if sector is Parity.EVEN else odd_base(g)
    evidence = {
        "group_order": len(enum),
        "order_formula": sp_order(g),
        "norm_signed": str(character_norm(g, sector, True, enum)),
        "expected_norm_signed": components,
        "double_cosets": double_coset_count(base, enum),
        "cocycle_violations": _cocycle_violations(g, seed),
    }
    ok = (evidence["group_order"] == evidence["order_formula"]
          and evidence["norm_signed"] == str(components)
          and evidence["cocycle_violations"] == 0)
    if sector is Parity.EVEN:
        evidence["norm_trivial"] = str(character_norm(g, sector, False, enum))
        evidence["transitivity"] = transitivity_report(g, enum)["ok"]
        ok = ok and evidence["norm_trivial"] == "2" and evidence["transitivity"]
    return ok, evidence


def _tvg_check(g: int, seed: int, samples: int | None) -> tuple[bool, dict]:
    exp = expected_dims(g)
    rep = rank_theta_powers(g, 4, samples, seed=seed)
    residual = verify_vplus_relations(g, 10, seed)
    kernel = kernel_matches_vplus(g, samples, seed=seed)
    taus = sample_points(g, 5, seed)
    transform = max(check_transformation_4th(s, m, t)
                    for s in integer_generators(g)
                    for m in characteristics(g, Parity.EVEN) for t in taus)
    evidence = {"rank": rep.as_dict(), "expected_rank": exp["W+"],
                "vplus_residual": residual, "kernel_matches_vplus": kernel,
                "transformation_4th_max_residual": transform}
    ok = (rep.rank == exp["W+"] and rep.conclusive and residual < 1e-8 and kernel
          and transform < 1e-9)
    return ok, evidence


def _smt_check(g: int, seed: int, samples: int | None) -> tuple[bool, dict]:
    exp = expected_dims(g)
    rep = rank_gradient_span(g, samples, seed=seed)
    residual = verify_wminus_relations(g, 5, seed)
    evidence = {"rank": rep.as_dict(), "expected_rank": exp["V-"], "wminus_residual": residual,
                "rank_plus_dim_wminus": rep.rank + exp["W-"], "odd_count": count(g, Parity.ODD)}
    ok = rep.rank == exp["V-"] and rep.conclusive and residual < 1e-8
    return ok, evidence


def _ci_check(g: int, seed: int, samples: int | None) -> tuple[bool, dict]:
    kp = count(g, Parity.EVEN)
    ranks = {}
    ok = True
    for k in (1, 2, 4, 8, 12):
        rep = rank_theta_powers(g, k, samples, seed=seed)
        expected = expected_dims(g)["W+"] if k == 4 else kp
        ranks[str(k)] = {"rank": rep.rank, "expected": expected, "gap_ratio": rep.as_dict()["gap_ratio"]}
        ok = ok and rep.rank == expected and rep.conclusive
    nonvanishing = {str(k): genus1_nonvanishing(k, seed=seed) for k in (8, 12, 20)}
    for v in nonvanishing.values():
        ok = ok and v["minus"] > 1e-6 and v["plus"] > 1e-6
    evidence = {"ranks": ranks, "genus1_nonvanishing": nonvanishing}
    if g <= 2:
        sep = {str(k): translation_character_separation(g, k, seed) for k in (1, 2, 3)}
        evidence["translation_separation"] = sep
        ok = ok and all(sep.values())
    return ok, evidence


def _phi_check(g: int) -> tuple[bool, dict]:
    results = {str(k): phi_display_check(g, k) for k in (4, 8, 12)}
    return all(results.values()), {"display_matches": results}


CHECK_TAGS = ("fay-even", "fay-odd", "frame-even", "frame-odd", "tvg", "smt", "ci", "phi")
VERIFY_GROUPS = {
    "all": CHECK_TAGS,
    "tvg": ("tvg",),
    "smt": ("smt",),
    "ci": ("ci", "phi"),
    "phi": ("phi",),
}


def run_checks(tags, g: int, seed: int, samples: int | None) -> list[dict]:
    out = []
    for tag in tags:
        if tag == "fay-even":
            out.append(_check(tag, "Fay spectrum of M+", lambda: _fay_check(g, Parity.EVEN, seed)))
        elif tag == "fay-odd":
            out.append(_check(tag, "Fay spectrum of M-", lambda: _fay_check(g, Parity.ODD, seed)))
        elif tag in ("frame-even", "frame-odd"):
            sector = Parity.EVEN if tag == "frame-even" else Parity.ODD
            name = f"Frame decomposition, {sector.value} sector"
            if g > MAX_ENUM_GENUS:
                out.append(_skipped(tag, name, "needs full group enumeration (g <= 3)"))
            else:
                out.append(_check(tag, name, lambda s=sector: _frame_check(g, s, seed)))
        elif tag == "phi":
            out.append(_check(tag, "Phi-operator reduction to genus 1", lambda: _phi_check(g)))
        else:
            fn, name = {
                "tvg": (_tvg_check, "dim T_g and quartic relations"),
                "smt": (_smt_check, "span of Sym^4 gradients"),
                "ci": (_ci_check, "independence of k-th powers"),
            }[tag]
            if g > MAX_NUMERIC_GENUS:
                out.append(_skipped(tag, name, "numerical checks run for g <= 3"))
            else:
                out.append(_check(tag, name, lambda f=fn: f(g, seed, samples)))
    return out


# ---------------------------------------------------------------------------
# subcommands


def _genus(cfg: RunConfig, hi: int) -> None:
    if not 1 <= cfg.g <= hi:
        raise UsageError(f"{cfg.command} {cfg.action}: genus must be in 1..{hi}, got {cfg.g}")


def cmd_group(cfg: RunConfig) -> tuple[dict, bool]:
    _genus(cfg, MAX_ENUM_GENUS)
    t0 = time.perf_counter()
    enum = enumerate_group(cfg.g)
    if cfg.action == "order":
        payload = {"g": cfg.g, "bfs_order": len(enum), "formula_order": sp_order(cfg.g)}
        ok = payload["bfs_order"] == payload["formula_order"]
    elif cfg.action == "cosets":
        payload = {"g": cfg.g,
                   "even_base": double_coset_count(Characteristic.zero(cfg.g), enum),
                   "odd_base": double_coset_count(odd_base(cfg.g), enum)}
        ok = payload["even_base"] == 2 and payload["odd_base"] == (2 if cfg.g > 1 else 1)
    else:
        payload = transitivity_report(cfg.g, enum)
        ok = payload["ok"]
    payload["seconds"] = round(time.perf_counter() - t0, 3)
    return payload, ok


def cmd_rep(cfg: RunConfig) -> tuple[dict, bool]:
    _genus(cfg, MAX_ENUM_GENUS)
    t0 = time.perf_counter()
    enum = enumerate_group(cfg.g)
    norm = character_norm(cfg.g, cfg.sector, cfg.extra["signed"], enum)
    payload = {"norm": str(norm), "group_order": len(enum),
               "seconds": round(time.perf_counter() - t0, 3)}
    return payload, True


def cmd_fay(cfg: RunConfig) -> tuple[dict | str, bool]:
    _genus(cfg, MAX_EXACT_GENUS)
    if cfg.action == "dims":
        payload = {}
        for sector, tag in ((Parity.EVEN, "+"), (Parity.ODD, "-")):
            V, W = exact_eigenspaces(build_fay(cfg.g, sector))
            payload["V" + tag] = V.dim
            payload["W" + tag] = W.dim
        return payload, payload == expected_dims(cfg.g)
    if cfg.action == "dump":
        return build_fay(cfg.g, cfg.sector).dump(), True
    checks = run_checks(("fay-even", "fay-odd"), cfg.g, cfg.seed, None)
    return {"checks": checks}, all(c["status"] == "pass" for c in checks)


def cmd_theta(cfg: RunConfig) -> tuple[dict, bool]:
    _genus(cfg, MAX_NUMERIC_GENUS)
    tol = cfg.tol or DEFAULT_TOL
    if cfg.action == "eval":
        m = Characteristic.parse(cfg.extra["m"])
        if m.g != cfg.g:
            raise UsageError(f"--m {cfg.extra['m']} does not have genus {cfg.g}")
        tau = sample_points(cfg.g, 1, cfg.extra["tau_seed"])[0]
        ev = theta_nullwert(m, tau, tol)
        return {"re": ev.value.real, "im": ev.value.imag, "trunc_bound": ev.trunc_bound}, True
    taus = sample_points(cfg.g, cfg.samples or 5, cfg.seed)
    worst = max(check_transformation_4th(s, m, t, tol)
                for s in integer_generators(cfg.g)
                for m in characteristics(cfg.g, Parity.EVEN) for t in taus)
    return {"g": cfg.g, "max_residual": worst, "threshold": 1e-9}, worst < 1e-9


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    _genus(cfg, MAX_EXACT_GENUS)
    checks = run_checks(VERIFY_GROUPS[cfg.action], cfg.g, cfg.seed, cfg.samples)
    ok = all(c["status"] != "fail" for c in checks)
    return {"checks": checks, "all_pass": ok}, ok


COMMANDS = {"group": cmd_group, "rep": cmd_rep, "fay": cmd_fay, "theta": cmd_theta,
            "verify": cmd_verify}


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetafay", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, g_default: int) -> None:
        p.add_argument("--g", type=int, default=g_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--sector", choices=["even", "odd"], default="even")
        p.add_argument("--out", default=None)

    p = sub.add_parser("group", help="Sp(g, F2) enumeration facts")
    p.add_argument("action", choices=["order", "cosets", "transitivity"])
    common(p, MAX_ENUM_GENUS)

    p = sub.add_parser("rep", help="induced representation characters")
    p.add_argument("action", choices=["norm"])
    p.add_argument("--signed", type=_bool, default=True)
    common(p, MAX_ENUM_GENUS)

    p = sub.add_parser("fay", help="Fay's operators")
    p.add_argument("action", choices=["dims", "dump", "check"])
    common(p, MAX_EXACT_GENUS)

    p = sub.add_parser("theta", help="theta nullwerte")
    p.add_argument("action", choices=["eval", "transform"])
    p.add_argument("--m", default=None, help="characteristic as a1..ag|b1..bg")
    p.add_argument("--tau-seed", type=int, default=0)
    common(p, MAX_NUMERIC_GENUS)

    p = sub.add_parser("verify", help="verification battery")
    p.add_argument("action", choices=sorted(VERIFY_GROUPS))
    common(p, MAX_NUMERIC_GENUS)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    if args.tol is not None and args.tol <= 0:
        raise UsageError("--tol must be positive")
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be positive")
    extra = {}
    if args.command == "rep":
        extra["signed"] = args.signed
    if args.command == "theta":
        extra["tau_seed"] = args.tau_seed
        if args.action == "eval":
            if args.m is None:
                raise UsageError("theta eval needs --m")
            extra["m"] = args.m
    return RunConfig(args.command, args.action, args.g, args.seed, args.tol, args.samples,
                     args.sector, args.out, extra)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        cfg = _config(args)
        payload, ok = COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(payload, str):
        text = payload
    else:
        if cfg.command in ("verify",) or (cfg.command == "fay" and cfg.action == "check"):
            payload = {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
                       "config": cfg.echo(), **payload}
        text = json.dumps(payload, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
