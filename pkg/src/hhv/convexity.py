"""Sampling-based certifiers for convexity classes and their margins.

Each certifier evaluates the defining inequality of its class on a
deterministic lattice of (x, y, t) triples unioned with counter-based
pseudo-random triples, reports the minimum signed margin (right side
minus left side), and returns the smallest-index witness on violation.
A positive verdict is always ``holds_on_samples``; sampling cannot prove
a universally quantified inequality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvalError, PhiRangeViolated, PositivityViolated
from .expr import Expr, Interval, check_positive, parse

__all__ = [
    "SamplePlan", "SampleTriple", "PhiMap", "ConvexityReport",
    "LinkCheck", "ImplicationLatticeReport", "EquivalenceReport",
    "VERDICT_HOLDS", "VERDICT_VIOLATED",
    "check_convex", "check_log_convex", "check_phi_convex",
    "check_log_phi_convex", "check_log_phi_midconvex",
    "check_implication_chain",
    "check_log_phi_chord_equivalence", "check_phi_chord_equivalence",
]

VERDICT_HOLDS = "holds_on_samples"
VERDICT_VIOLATED = "violated"

DEFAULT_TOLERANCE = 1e-9
POSITIVITY_GRID = 257
PHI_GRID = 257

_MASK64 = (1 << 64) - 1
_STREAM_TRIPLES = 0x7472_6970  # distinct Philox streams per purpose
_STREAM_PAIRS = 0x7061_6972

_UNIT = Interval(0.0, 1.0)


def _philox(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream & _MASK64]))


# ----------------------------- plans and reports -----------------------------

@dataclass(frozen=True)
class SamplePlan:
    """Lattice sizes plus the count of seeded pseudo-random triples.

    The t grid must be odd so that it contains 0, 1/2, and 1; random
    triples come from a counter-based generator keyed on (seed, index),
    so a larger ``random_count`` extends rather than reshuffles the set.
    """

    x_points: int = 33
    t_points: int = 17
    random_count: int = 4096
    seed: int = 0

    def __post_init__(self) -> None:
        if self.x_points < 2:
            raise ValueError(f"x_points must be >= 2, got {self.x_points}")
        if self.t_points < 3 or self.t_points % 2 == 0:
            raise ValueError(f"t_points must be odd and >= 3, got {self.t_points}")
        if self.random_count < 0:
            raise ValueError(f"random_count must be >= 0, got {self.random_count}")

    def triples(self, interval: Interval) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        gx = np.linspace(interval.a, interval.b, self.x_points)
        gt = np.linspace(0.0, 1.0, self.t_points)
        x, y, t = np.meshgrid(gx, gx, gt, indexing="ij")
        xs, ys, ts = x.ravel(), y.ravel(), t.ravel()
        if self.random_count:
            u = _philox(self.seed, _STREAM_TRIPLES).random((self.random_count, 3))
            xs = np.concatenate([xs, interval.a + interval.width * u[:, 0]])
            ys = np.concatenate([ys, interval.a + interval.width * u[:, 1]])
            ts = np.concatenate([ts, u[:, 2]])
        return xs, ys, ts


@dataclass(frozen=True)
class SampleTriple:
    x: float
    y: float
    t: float


@dataclass(frozen=True)
class PhiMap:
    """A deformation map together with the domain it must map into itself.

    Self-mapping is checked at construction on a fixed grid, with an
    absolute slack proportional to the domain scale so that maps whose
    range touches an endpoint survive rounding.
    """

    phi: Expr
    domain: Interval

    def __post_init__(self) -> None:
        grid = np.linspace(self.domain.a, self.domain.b, PHI_GRID)
        vals = self.phi.eval_array(grid)
        self._require_in_domain(grid, vals)

    def _require_in_domain(self, xs: np.ndarray, vals: np.ndarray) -> None:
        slack = 1e-9 * max(1.0, abs(self.domain.a), abs(self.domain.b))
        bad = (vals < self.domain.a - slack) | (vals > self.domain.b + slack)
        if bad.any():
            i = int(np.argmax(bad))
            raise PhiRangeViolated(float(xs[i]), float(vals[i]), self.domain.a, self.domain.b)

    @staticmethod
    def identity(domain: Interval) -> "PhiMap":
        return PhiMap(parse("x"), domain)

    @property
    def at_a(self) -> float:
        return self.phi.eval(self.domain.a)

    @property
    def at_b(self) -> float:
        return self.phi.eval(self.domain.b)

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        vals = self.phi.eval_array(xs)
        self._require_in_domain(np.asarray(xs, dtype=float), vals)
        return vals


@dataclass(frozen=True)
class ConvexityReport:
    class_checked: str
    verdict: str  # VERDICT_HOLDS | VERDICT_VIOLATED
    samples_tested: int
    min_margin: float
    witness: SampleTriple | None
    tolerance: float
    failure_kind: str | None = None  # "inequality" | "domain" | None
    failure_detail: str | None = None


@dataclass(frozen=True)
class LinkCheck:
    name: str
    verdict: str
    min_margin: float
    witness: SampleTriple | None


@dataclass(frozen=True)
class ImplicationLatticeReport:
    links: tuple[LinkCheck, ...]
    samples_tested: int
    tolerance: float

    @property
    def verdict(self) -> str:
        if all(link.verdict == VERDICT_HOLDS for link in self.links):
            return VERDICT_HOLDS
        return VERDICT_VIOLATED


@dataclass(frozen=True)
class EquivalenceReport:
    kind: str  # "log_phi" | "phi"
    agree: bool
    pairs_tested: int
    direct_verdict: str
    segment_verdict: str
    disagreeing_pair: tuple[float, float] | None
    seed: int


# ----------------------------- margin engine ---------------------------------

class _Segment:
    """t -> f(t*u + (1-t)*v), the restriction of f to a deformed chord."""

    def __init__(self, f, u: float, v: float):
        self.f = f
        self.u = float(u)
        self.v = float(v)

    def eval_array(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return self.f.eval_array(ts * self.u + (1.0 - ts) * self.v)

    def eval(self, t: float) -> float:
        return float(self.eval_array(np.array([t]))[0])


def _require_positive_values(vals: np.ndarray, points: np.ndarray) -> None:
    bad = ~(vals > 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise PositivityViolated(float(points[i]), f"f = {vals[i]!r} is not positive")


def _margins(f, phi: PhiMap | None, xs, ys, ts, log_space: bool) -> np.ndarray:
    if phi is not None:
        px = phi.eval_array(xs)
        py = phi.eval_array(ys)
    else:
        px, py = xs, ys
    mix = ts * px + (1.0 - ts) * py
    fx = f.eval_array(px)
    fy = f.eval_array(py)
    fm = f.eval_array(mix)
    if log_space:
        _require_positive_values(fx, px)
        _require_positive_values(fy, py)
        _require_positive_values(fm, mix)
        return ts * np.log(fx) + (1.0 - ts) * np.log(fy) - np.log(fm)
    return ts * fx + (1.0 - ts) * fy - fm


def _assemble(class_checked, xs, ys, ts, tolerance, margins=None, eval_error=None,
              samples=None) -> ConvexityReport:
    n = len(xs) if samples is None else samples
    if eval_error is not None:
        idx = eval_error.index or 0
        witness = SampleTriple(float(xs[idx]), float(ys[idx]), float(ts[idx]))
        return ConvexityReport(
            class_checked=class_checked, verdict=VERDICT_VIOLATED, samples_tested=n,
            min_margin=float("-inf"), witness=witness, tolerance=tolerance,
            failure_kind="domain", failure_detail=str(eval_error),
        )
    if margins.size == 0:
        return ConvexityReport(class_checked, VERDICT_HOLDS, 0, float("inf"),
                               None, tolerance)
    min_margin = float(margins.min())
    if min_margin < -tolerance:
        # worst violation; argmin picks the smallest index among exact ties
        idx = int(np.argmin(margins))
        witness = SampleTriple(float(xs[idx]), float(ys[idx]), float(ts[idx]))
        return ConvexityReport(
            class_checked=class_checked, verdict=VERDICT_VIOLATED, samples_tested=n,
            min_margin=min_margin, witness=witness, tolerance=tolerance,
            failure_kind="inequality",
        )
    return ConvexityReport(class_checked, VERDICT_HOLDS, n, min_margin, None, tolerance)


def _run_check(class_checked, f, phi, interval, sampler, tolerance, log_space,
               force_half_t=False) -> ConvexityReport:
    xs, ys, ts = sampler.triples(interval)
    if force_half_t:
        ts = np.full_like(ts, 0.5)
    try:
        margins = _margins(f, phi, xs, ys, ts, log_space)
    except EvalError as err:
        return _assemble(class_checked, xs, ys, ts, tolerance, eval_error=err)
    return _assemble(class_checked, xs, ys, ts, tolerance, margins=margins)


def _require_positivity(f, interval: Interval, grid: int) -> None:
    res = check_positive(f, interval, grid)
    if not res.ok:
        raise PositivityViolated(res.witness, res.detail)


# ----------------------------- certifiers ------------------------------------

def check_convex(f, interval: Interval, sampler: SamplePlan = SamplePlan(), *,
                 tolerance: float = DEFAULT_TOLERANCE) -> ConvexityReport:
    """Margins of t*f(x) + (1-t)*f(y) - f(t*x + (1-t)*y) over the sample plan."""
    return _run_check("convex", f, None, interval, sampler, tolerance, log_space=False)


def check_log_convex(f, interval: Interval, sampler: SamplePlan = SamplePlan(), *,
                     tolerance: float = DEFAULT_TOLERANCE,
                     positivity_grid: int = POSITIVITY_GRID) -> ConvexityReport:
    """Log-space margins of the multiplicative bound f(mix) <= f(x)^t f(y)^(1-t)."""
    _require_positivity(f, interval, positivity_grid)
    return _run_check("log_convex", f, None, interval, sampler, tolerance, log_space=True)


def check_phi_convex(f, phi: PhiMap, sampler: SamplePlan = SamplePlan(), *,
                     tolerance: float = DEFAULT_TOLERANCE) -> ConvexityReport:
    """Convexity along the deformation: f(t*phi(x) + (1-t)*phi(y)) against the chord."""
    return _run_check("phi_convex", f, phi, phi.domain, sampler, tolerance, log_space=False)


def check_log_phi_convex(f, phi: PhiMap, sampler: SamplePlan = SamplePlan(), *,
                         tolerance: float = DEFAULT_TOLERANCE,
                         positivity_grid: int = POSITIVITY_GRID) -> ConvexityReport:
    _require_positivity(f, phi.domain, positivity_grid)
    return _run_check("log_phi_convex", f, phi, phi.domain, sampler, tolerance,
                      log_space=True)


def check_log_phi_midconvex(f, phi: PhiMap, sampler: SamplePlan = SamplePlan(), *,
                            tolerance: float = DEFAULT_TOLERANCE,
                            positivity_grid: int = POSITIVITY_GRID) -> ConvexityReport:
    """The t = 1/2 restriction; the sampler's t component is ignored."""
    _require_positivity(f, phi.domain, positivity_grid)
    return _run_check("log_phi_midconvex", f, phi, phi.domain, sampler, tolerance,
                      log_space=True, force_half_t=True)


# ----------------------------- implication lattice ---------------------------

def check_implication_chain(f, phi: PhiMap, sampler: SamplePlan = SamplePlan(), *,
                            tolerance: float = DEFAULT_TOLERANCE,
                            positivity_grid: int = POSITIVITY_GRID,
                            ) -> ImplicationLatticeReport:
    """Per-link margins of the pointwise chain

    f(t*phi(x) + (1-t)*phi(y)) <= f(phi(x))^t * f(phi(y))^(1-t)
                               <= t*f(phi(x)) + (1-t)*f(phi(y))
                               <= max(f(phi(x)), f(phi(y))).

    Links 2 and 3 (weighted AM-GM, and convex combination below the max)
    hold for every positive f; only link 1 reflects the convexity class.
    """
    _require_positivity(f, phi.domain, positivity_grid)
    xs, ys, ts = sampler.triples(phi.domain)
    px = phi.eval_array(xs)
    py = phi.eval_array(ys)
    mix = ts * px + (1.0 - ts) * py
    fx = f.eval_array(px)
    fy = f.eval_array(py)
    fm = f.eval_array(mix)
    _require_positive_values(fx, px)
    _require_positive_values(fy, py)
    _require_positive_values(fm, mix)
    lfx, lfy = np.log(fx), np.log(fy)
    weighted_gm = np.exp(ts * lfx + (1.0 - ts) * lfy)
    weighted_am = ts * fx + (1.0 - ts) * fy

    link_margins = (
        ("multiplicative_bound", ts * lfx + (1.0 - ts) * lfy - np.log(fm)),
        ("weighted_am_gm", weighted_am - weighted_gm),
        ("max_bound", np.maximum(fx, fy) - weighted_am),
    )
    links = []
    for name, margins in link_margins:
        min_margin = float(margins.min())
        if min_margin < -tolerance:
            idx = int(np.argmin(margins))
            witness = SampleTriple(float(xs[idx]), float(ys[idx]), float(ts[idx]))
            links.append(LinkCheck(name, VERDICT_VIOLATED, min_margin, witness))
        else:
            links.append(LinkCheck(name, VERDICT_HOLDS, min_margin, None))
    return ImplicationLatticeReport(tuple(links), len(xs), tolerance)


# ----------------------------- chord equivalences ----------------------------

def _chord_equivalence(kind: str, f, phi: PhiMap, pair_count: int,
                       sampler: SamplePlan, seed: int, tolerance: float,
                       log_space: bool) -> EquivalenceReport:
    if pair_count < 0:
        raise ValueError(f"pair_count must be >= 0, got {pair_count}")
    if pair_count == 0:
        return EquivalenceReport(kind, True, 0, VERDICT_HOLDS, VERDICT_HOLDS, None, seed)

    dom = phi.domain
    u = _philox(seed, _STREAM_PAIRS).random((pair_count, 2))
    pair_x = dom.a + dom.width * u[:, 0]
    pair_y = dom.a + dom.width * u[:, 1]

    # direct side on matched samples: the drawn pairs crossed with the t lattice
    gt = np.linspace(0.0, 1.0, sampler.t_points)
    xs = np.repeat(pair_x, sampler.t_points)
    ys = np.repeat(pair_y, sampler.t_points)
    ts = np.tile(gt, pair_count)
    direct_margins = _margins(f, phi, xs, ys, ts, log_space)
    direct_violated = direct_margins < -tolerance
    direct_verdict = VERDICT_VIOLATED if direct_violated.any() else VERDICT_HOLDS

    # segment side: each pair induces g(t) = f(t*phi(x) + (1-t)*phi(y)) on [0, 1]
    px = phi.eval_array(pair_x)
    py = phi.eval_array(pair_y)
    segment_verdict = VERDICT_HOLDS
    first_bad_pair: tuple[float, float] | None = None
    check = check_log_convex if log_space else check_convex
    for i in range(pair_count):
        seg = _Segment(f, px[i], py[i])
        rep = check(seg, _UNIT, sampler, tolerance=tolerance)
        if rep.verdict == VERDICT_VIOLATED:
            segment_verdict = VERDICT_VIOLATED
            if first_bad_pair is None:
                first_bad_pair = (float(pair_x[i]), float(pair_y[i]))

    agree = direct_verdict == segment_verdict
    disagreeing: tuple[float, float] | None = None
    if not agree:
        if segment_verdict == VERDICT_VIOLATED:
            disagreeing = first_bad_pair
        else:
            idx = int(np.argmax(direct_violated))
            disagreeing = (float(xs[idx]), float(ys[idx]))
    return EquivalenceReport(kind, agree, pair_count, direct_verdict,
                             segment_verdict, disagreeing, seed)


def check_log_phi_chord_equivalence(f, phi: PhiMap, pair_count: int,
                                    sampler: SamplePlan = SamplePlan(),
                                    seed: int = 0, *,
                                    tolerance: float = DEFAULT_TOLERANCE,
                                    positivity_grid: int = POSITIVITY_GRID,
                                    ) -> EquivalenceReport:
    """Empirical biconditional: the multiplicative bound along phi holds on
    sampled triples iff every induced chord map g is log-convex on [0, 1]."""
    _require_positivity(f, phi.domain, positivity_grid)
    return _chord_equivalence("log_phi", f, phi, pair_count, sampler, seed,
                              tolerance, log_space=True)


def check_phi_chord_equivalence(f, phi: PhiMap, pair_count: int,
                                sampler: SamplePlan = SamplePlan(),
                                seed: int = 0, *,
                                tolerance: float = DEFAULT_TOLERANCE,
                                ) -> EquivalenceReport:
    """Additive analogue of :func:`check_log_phi_chord_equivalence` (plain convexity)."""
    return _chord_equivalence("phi", f, phi, pair_count, sampler, seed,
                              tolerance, log_space=False)
