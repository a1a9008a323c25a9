"""Seeded generation of candidate functions and budgeted counterexample search.

Every draw is a pure function of the relevant (seed, trial, role) triple,
through per-purpose Philox streams, so outcomes are reproducible and
independent of execution order.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .chains import (
    CHAIN_IDS, ChainReport, eval_classic_hh, eval_dragomir_mond, eval_theorem1,
    eval_theorem2, VERDICT_LINK_VIOLATED,
)
from .convexity import (
    ConvexityReport, PhiMap, SamplePlan, VERDICT_VIOLATED,
    check_convex, check_log_convex, check_log_phi_convex,
    check_log_phi_midconvex, check_phi_convex,
)
from .errors import GenerationExhausted, HHVError, PhiRangeViolated
from .expr import Expr, Interval, check_positive, parse

__all__ = [
    "FamilySpec", "SearchTarget", "SearchWitness", "SearchOutcome",
    "FAMILIES", "generate", "generate_phi", "find_counterexample",
]

FAMILIES = ("exp_of_poly", "positive_poly", "affine_exp", "power")

_MASK64 = (1 << 64) - 1
_MAX_TRIES = 16
_STREAM_GEN = 0x6765_6e00  # generation attempts occupy a block of streams


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of one random function family.

    ``coeff_range`` bounds the coefficient draws; ``positive_poly`` requires
    a non-negative lower bound and draws in the half-open (lo, hi].  The
    ``power`` family ignores the range and draws its exponent in [-3, 3].
    """

    family: str
    degree_bound: int = 2
    coeff_range: tuple[float, float] = (0.0, 2.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; use one of {FAMILIES}")
        if self.degree_bound < 0:
            raise ValueError(f"degree_bound must be >= 0, got {self.degree_bound}")
        lo, hi = self.coeff_range
        if not lo < hi:
            raise ValueError(f"coeff_range must be increasing, got {self.coeff_range}")
        if self.family == "positive_poly" and lo < 0:
            raise ValueError("positive_poly requires a non-negative coeff_range lower bound")


@dataclass(frozen=True)
class SearchTarget:
    kind: str  # "check" | "chain"
    name: str  # convexity class or chain id

    def __post_init__(self) -> None:
        if self.kind not in ("check", "chain"):
            raise ValueError(f"target kind must be 'check' or 'chain', got {self.kind!r}")
        valid = _CHECKS.keys() if self.kind == "check" else CHAIN_IDS
        if self.name not in valid:
            raise ValueError(f"unknown {self.kind} target {self.name!r}; use one of {sorted(valid)}")


@dataclass(frozen=True)
class SearchWitness:
    f_text: str
    phi_text: str | None
    g_text: str | None
    trial: int
    report: ConvexityReport | ChainReport


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    witness: SearchWitness | None
    trials: int
    seed: int
    skipped: dict[str, int]


# ----------------------------- generation ------------------------------------

def _philox(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream & _MASK64]))


def _derive_seed(seed: int, trial: int, role: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{trial}:{role}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _open_closed(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    # uniform on (lo, hi]: flip the half-open [0, 1) unit draw
    return hi - (hi - lo) * rng.random(size)


def _poly_text(coeffs: np.ndarray, var: str = "x") -> str:
    parts: list[str] = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = float(coeffs[k])
        mag = repr(abs(c))
        if k >= 2:
            piece = f"{mag}*{var}^{k}"
        elif k == 1:
            piece = f"{mag}*{var}"
        else:
            piece = mag
        if not parts:
            parts.append(piece if c >= 0 else f"-{piece}")
        else:
            parts.append(f" {'+' if c >= 0 else '-'} {piece}")
    return "".join(parts)


def _build_text(spec: FamilySpec, rng: np.random.Generator) -> str:
    lo, hi = spec.coeff_range
    if spec.family == "exp_of_poly":
        degree = int(rng.integers(0, spec.degree_bound + 1))
        coeffs = rng.uniform(lo, hi, degree + 1)
        return f"exp({_poly_text(coeffs)})"
    if spec.family == "positive_poly":
        degree = int(rng.integers(min(1, spec.degree_bound), spec.degree_bound + 1))
        coeffs = _open_closed(rng, lo, hi, degree + 1)
        return _poly_text(coeffs)
    if spec.family == "affine_exp":
        scale = float(_open_closed(rng, max(lo, 0.0), hi, 1)[0])
        rate = float(rng.uniform(-hi, hi))
        shift = float(rng.uniform(max(lo, 0.0), hi))
        return f"{scale!r}*exp({rate!r}*x) + {shift!r}"
    if spec.family == "power":
        r = float(rng.uniform(-3.0, 3.0))
        return f"x^{r!r}"
    raise AssertionError(spec.family)


def generate(spec: FamilySpec, domain: Interval) -> Expr:
    """Draw one positivity-validated expression; a pure function of (spec, domain).

    Candidates failing the positivity grid check are discarded and redrawn
    from the next attempt stream, up to a bounded number of retries.
    """
    for attempt in range(_MAX_TRIES):
        rng = _philox(spec.seed, _STREAM_GEN + attempt)
        text = _build_text(spec, rng)
        expr = parse(text)
        if check_positive(expr, domain).ok:
            return expr
    raise GenerationExhausted(spec.family, _MAX_TRIES)


def generate_phi(spec: FamilySpec, domain: Interval) -> PhiMap:
    """Draw a monotone self-map of ``domain``.

    A polynomial with positive coefficients is normalized to [0, 1] on the
    rescaled variable and mapped affinely back onto the domain, so the
    self-mapping property holds by construction.
    """
    a, w = domain.a, domain.width
    degree = max(1, spec.degree_bound)
    for attempt in range(_MAX_TRIES):
        rng = _philox(spec.seed, _STREAM_GEN + attempt)
        deg = int(rng.integers(1, degree + 1))
        coeffs = _open_closed(rng, max(spec.coeff_range[0], 0.0),
                              spec.coeff_range[1], deg + 1)
        var = f"((x - {a!r})/{w!r})"
        raw_text = _poly_text(coeffs, var=var)
        raw = parse(raw_text)
        r0 = raw.eval(domain.a)
        r1 = raw.eval(domain.b)
        if not r1 > r0:
            continue
        text = f"{a!r} + {w!r}*({raw_text} - {r0!r})/{(r1 - r0)!r}"
        try:
            return PhiMap(parse(text), domain)
        except PhiRangeViolated:
            continue
    raise GenerationExhausted("phi", _MAX_TRIES)


# ----------------------------- search ----------------------------------------

_CHECKS = {
    "convex": ("plain", check_convex),
    "log_convex": ("plain", check_log_convex),
    "phi_convex": ("phi", check_phi_convex),
    "log_phi_convex": ("phi", check_log_phi_convex),
    "log_phi_midconvex": ("phi", check_log_phi_midconvex),
}


def _run_target(target: SearchTarget, f: Expr, g: Expr | None, phi: PhiMap | None,
                domain: Interval, sampler: SamplePlan, tolerance: float,
                quad_tol: float, chain_tolerance: float):
    if target.kind == "check":
        style, fn = _CHECKS[target.name]
        if style == "plain":
            report = fn(f, domain, sampler, tolerance=tolerance)
        else:
            report = fn(f, phi if phi is not None else PhiMap.identity(domain),
                        sampler, tolerance=tolerance)
        return report, report.verdict == VERDICT_VIOLATED
    phi_map = phi if phi is not None else PhiMap.identity(domain)
    if target.name == "classic_hh":
        report = eval_classic_hh(f, domain, quad_tol, chain_tolerance)
    elif target.name == "dragomir_mond":
        report = eval_dragomir_mond(f, domain, quad_tol, chain_tolerance)
    elif target.name == "theorem1":
        report = eval_theorem1(f, phi_map, quad_tol, chain_tolerance)
    else:
        report = eval_theorem2(f, g if g is not None else f, phi_map,
                               quad_tol, chain_tolerance)
    return report, report.verdict == VERDICT_LINK_VIOLATED


def find_counterexample(
    target: SearchTarget,
    f_spec: FamilySpec,
    phi_spec: FamilySpec | None,
    domain: Interval,
    budget: int,
    seed: int,
    *,
    g_spec: FamilySpec | None = None,
    sampler: SamplePlan = SamplePlan(),
    tolerance: float = 1e-9,
    quad_tol: float = 1e-10,
    chain_tolerance: float = 1e-8,
) -> SearchOutcome:
    """Iterate seeded candidates against ``target`` until one violates it.

    ``phi_spec=None`` means the identity map.  For the product chain a
    second integrand is drawn from ``g_spec`` (default: ``f_spec`` on an
    independent stream).  Candidates whose generation or hypotheses fail
    count as trials with the skip reason tallied, never as violations.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    needs_g = target.kind == "chain" and target.name == "theorem2"
    skipped: dict[str, int] = {}

    def _skip(reason: str) -> None:
        skipped[reason] = skipped.get(reason, 0) + 1

    for trial in range(budget):
        try:
            f = generate(replace(f_spec, seed=_derive_seed(seed, trial, 0)), domain)
            phi = None
            if phi_spec is not None:
                phi = generate_phi(replace(phi_spec, seed=_derive_seed(seed, trial, 1)),
                                   domain)
            g = None
            if needs_g:
                base = g_spec if g_spec is not None else f_spec
                g = generate(replace(base, seed=_derive_seed(seed, trial, 2)), domain)
        except HHVError as err:
            _skip(type(err).__name__)
            continue
        try:
            report, violated = _run_target(target, f, g, phi, domain, sampler,
                                           tolerance, quad_tol, chain_tolerance)
        except HHVError as err:
            _skip(type(err).__name__)
            continue
        if violated:
            witness = SearchWitness(
                f_text=f.source_text,
                phi_text=phi.phi.source_text if phi is not None else None,
                g_text=g.source_text if g is not None else None,
                trial=trial,
                report=report,
            )
            return SearchOutcome(True, witness, trial + 1, seed, skipped)
    return SearchOutcome(False, None, budget, seed, skipped)
