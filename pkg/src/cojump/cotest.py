"""Tests for common price and volatility jumps.

At every detected price jump the spot squared volatility right of the jump
is compared with its left limit through the test function

    g(x1, x2) = 2 sqrt((x1 + x2)/2) - sqrt(x1) - sqrt(x2),

which vanishes iff both sides agree.  Three decision procedures share this
building block: a global chi-squared test over all jumps, a naive Gaussian
test based on the difference x1 - x2, and a Sidak-corrected multiple test
with per-jump decisions.

Two normalizations of the chi-squared statistic are offered.  The default
"fisher" self-normalizes each jump with the estimated Fisher informations,

    stat_i = 16 cbar_i^{3/2} g_i / (r_n (I_+^-1 + I_-^-1)),

which is calibrated in finite samples.  The "rate" variant applies the
asymptotic factor log(n) * r_inv * eta_hat^{-1/2} to the plain sum of g
values; both converge to the same chi-squared limit but the rate constant
is only accurate asymptotically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dists import chi2_cdf, chi2_upper_quantile, normal_cdf
from .jumps import JumpEvent
from .spotvol import SpotVolPath


@dataclass(frozen=True)
class TestConfig:
    """Significance level, test variant and statistic normalization."""

    level: float = 0.05
    variant: str = "chi2"
    a_min_jump: float = 0.0
    normalization: str = "fisher"
    time_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if self.variant not in ("chi2", "naive", "multiple"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.normalization not in ("fisher", "rate"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.a_min_jump < 0:
            raise ValueError("a_min_jump must be nonnegative")


@dataclass(frozen=True)
class PerJumpResult:
    event: JumpEvent
    c_right: float
    c_left: float
    g_value: float
    statistic: float
    p_value: float
    reject: bool


@dataclass(frozen=True)
class CoJumpReport:
    """Outcome of one test run, serializable to the CLI report format."""

    variant: str
    level: float
    normalization: str
    n_jumps: int
    statistic: float
    dof: int
    p_value: float
    reject: bool
    per_jump: list[PerJumpResult] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    normalization_factor: float = math.nan

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "level": self.level,
            "normalization": self.normalization,
            "n_jumps": self.n_jumps,
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "reject": self.reject,
            "normalization_factor": self.normalization_factor,
            "skipped": list(self.skipped),
            "per_jump": [
                {
                    "bin_start": r.event.bin_start,
                    "bin_end": r.event.bin_end,
                    "time": r.event.time,
                    "zeta_value": r.event.zeta_value,
                    "grouped": r.event.grouped,
                    "c_right": r.c_right,
                    "c_left": r.c_left,
                    "g_value": r.g_value,
                    "statistic": r.statistic,
                    "p_value": r.p_value,
                    "reject": r.reject,
                }
                for r in self.per_jump
            ],
        }


def g_stat(x1: float, x2: float) -> float:
    """Test function 2 sqrt((x1+x2)/2) - sqrt(x1) - sqrt(x2); zero iff x1 = x2."""
    if x1 < 0 or x2 < 0:
        raise ValueError("squared volatilities must be nonnegative")
    return 2.0 * math.sqrt(0.5 * (x1 + x2)) - math.sqrt(x1) - math.sqrt(x2)


def g_naive(x1: float, x2: float) -> float:
    """Linear test function x1 - x2 of the naive Gaussian test."""
    return x1 - x2


def filter_events(
    events: list[JumpEvent], time_range: tuple[float, float] | None
) -> list[JumpEvent]:
    """Restrict the test to a sub-interval by ignoring all jumps elsewhere."""
    if time_range is None:
        return list(events)
    lo, hi = time_range
    if not lo < hi:
        raise ValueError("time_range must satisfy lo < hi")
    return [e for e in events if lo <= e.time <= hi]


@dataclass(frozen=True)
class _JumpSides:
    event: JumpEvent
    c_right: float
    c_left: float
    fisher_right: float
    fisher_left: float
    var_scale_right: float
    var_scale_left: float


def _collect_sides(
    spot: SpotVolPath, events: list[JumpEvent], cfg: TestConfig
) -> tuple[list[_JumpSides], list[str]]:
    """Look up spot estimates right of the last and left of the first bin.

    Events whose windows would reach past the day's borders lie outside the
    tested interior range (bins r_inv .. h_inv - r_inv - 1) and are skipped:
    the statistic's distribution theory needs full windows on both sides.
    """
    r_inv = spot.config.r_inv
    h_inv = spot.grid.h_inv
    used, skipped = [], []
    for ev in filter_events(events, cfg.time_range):
        if cfg.a_min_jump > 0 and abs(ev.zeta_value) <= cfg.a_min_jump**2:
            continue
        if ev.bin_start < r_inv or ev.bin_end > h_inv - r_inv - 1:
            skipped.append(
                f"jump at bins {ev.bin_start}..{ev.bin_end}: outside tested range"
            )
            continue
        cr = float(spot.c_right[ev.bin_end])
        cl = float(spot.c_left[ev.bin_start])
        fr = float(spot.fisher_right[ev.bin_end])
        fl = float(spot.fisher_left[ev.bin_start])
        vr = float(spot.var_scale_right[ev.bin_end])
        vl = float(spot.var_scale_left[ev.bin_start])
        if any(math.isnan(v) for v in (cr, cl, fr, fl, vr, vl)):
            skipped.append(
                f"jump at bins {ev.bin_start}..{ev.bin_end}: spot estimate unavailable"
            )
            continue
        used.append(_JumpSides(ev, cr, cl, fr, fl, vr, vl))
    return used, skipped


def t0_statistic(spot: SpotVolPath, events: list[JumpEvent], g=g_stat) -> float:
    """Plain sum of g over detected jumps (negative estimates floored at 0 for g_stat)."""
    used, _ = _collect_sides(spot, events, TestConfig())
    if g is g_stat:
        return sum(g(max(s.c_right, 0.0), max(s.c_left, 0.0)) for s in used)
    return sum(g(s.c_right, s.c_left) for s in used)


def _fisher_statistic(s: _JumpSides) -> float:
    """Per-jump self-normalized statistic 16 cbar^{3/2} g / (r_n (I_+^-1 + I_-^-1)).

    The per-side variance scale equals r_n for full untruncated windows and
    accounts for partly truncated windows otherwise.
    """
    cr, cl = max(s.c_right, 0.0), max(s.c_left, 0.0)
    cbar = 0.5 * (cr + cl)
    if cbar == 0.0:
        return 0.0
    g = g_stat(cr, cl)
    denom = s.var_scale_right / s.fisher_right + s.var_scale_left / s.fisher_left
    return 16.0 * cbar**1.5 * g / denom


def _no_jump_report(cfg: TestConfig, skipped: list[str]) -> CoJumpReport:
    return CoJumpReport(
        variant=cfg.variant,
        level=cfg.level,
        normalization=cfg.normalization,
        n_jumps=0,
        statistic=0.0,
        dof=0,
        p_value=1.0,
        reject=False,
        skipped=skipped,
    )


def chi2_test(spot: SpotVolPath, events: list[JumpEvent], cfg: TestConfig) -> CoJumpReport:
    """Global chi-squared test over all detected jumps (Sum of per-jump statistics)."""
    used, skipped = _collect_sides(spot, events, cfg)
    if not used:
        return _no_jump_report(cfg, skipped)
    per_jump = []
    if cfg.normalization == "fisher":
        factor = math.nan
        stats = [_fisher_statistic(s) for s in used]
    else:
        factor = math.log(spot.grid.n) * spot.config.r_inv / math.sqrt(spot.eta_hat)
        stats = [
            factor * g_stat(max(s.c_right, 0.0), max(s.c_left, 0.0)) for s in used
        ]
    statistic = float(sum(stats))
    dof = len(used)
    p_value = 1.0 - chi2_cdf(statistic, dof)
    reject = statistic > chi2_upper_quantile(cfg.level, dof)
    for s, st in zip(used, stats):
        g = g_stat(max(s.c_right, 0.0), max(s.c_left, 0.0))
        per_jump.append(
            PerJumpResult(s.event, s.c_right, s.c_left, g, st, math.nan, reject)
        )
    return CoJumpReport(
        variant="chi2",
        level=cfg.level,
        normalization=cfg.normalization,
        n_jumps=dof,
        statistic=statistic,
        dof=dof,
        p_value=p_value,
        reject=reject,
        per_jump=per_jump,
        skipped=skipped,
        normalization_factor=factor,
    )


def naive_test(spot: SpotVolPath, events: list[JumpEvent], cfg: TestConfig) -> CoJumpReport:
    """Two-sided Gaussian test of sum (c_right - c_left), Fisher self-normalized."""
    used, skipped = _collect_sides(spot, events, cfg)
    if not used:
        return _no_jump_report(cfg, skipped)
    t0 = sum(g_naive(s.c_right, s.c_left) for s in used)
    scale = math.sqrt(
        2.0 * sum(s.var_scale_right / s.fisher_right for s in used)
    )
    statistic = t0 / scale
    p_value = 2.0 * (1.0 - normal_cdf(abs(statistic)))
    reject = p_value < cfg.level
    per_jump = [
        PerJumpResult(
            s.event, s.c_right, s.c_left, g_naive(s.c_right, s.c_left),
            math.nan, math.nan, reject,
        )
        for s in used
    ]
    return CoJumpReport(
        variant="naive",
        level=cfg.level,
        normalization=cfg.normalization,
        n_jumps=len(used),
        statistic=statistic,
        dof=len(used),
        p_value=p_value,
        reject=reject,
        per_jump=per_jump,
        skipped=skipped,
        normalization_factor=1.0 / scale,
    )


def multiple_test(spot: SpotVolPath, events: list[JumpEvent], cfg: TestConfig) -> CoJumpReport:
    """Sidak-corrected per-jump chi-squared tests controlling the familywise error."""
    used, skipped = _collect_sides(spot, events, cfg)
    if not used:
        return _no_jump_report(cfg, skipped)
    n = len(used)
    per_level = 1.0 - (1.0 - cfg.level) ** (1.0 / n)
    crit = chi2_upper_quantile(per_level, 1)
    if cfg.normalization == "fisher":
        factor = math.nan
        stats = [_fisher_statistic(s) for s in used]
    else:
        factor = math.log(spot.grid.n) * spot.config.r_inv / math.sqrt(spot.eta_hat)
        stats = [
            factor * g_stat(max(s.c_right, 0.0), max(s.c_left, 0.0)) for s in used
        ]
    per_jump = []
    any_reject = False
    for s, st in zip(used, stats):
        g = g_stat(max(s.c_right, 0.0), max(s.c_left, 0.0))
        p_i = 1.0 - chi2_cdf(st, 1)
        rej = st > crit
        any_reject = any_reject or rej
        per_jump.append(PerJumpResult(s.event, s.c_right, s.c_left, g, st, p_i, rej))
    max_stat = max(stats)
    return CoJumpReport(
        variant="multiple",
        level=cfg.level,
        normalization=cfg.normalization,
        n_jumps=n,
        statistic=float(max_stat),
        dof=1,
        p_value=1.0 - chi2_cdf(max_stat, 1),
        reject=any_reject,
        per_jump=per_jump,
        skipped=skipped,
        normalization_factor=factor,
    )


def run_test(spot: SpotVolPath, events: list[JumpEvent], cfg: TestConfig) -> CoJumpReport:
    """Dispatch to the configured test variant."""
    if cfg.variant == "chi2":
        return chi2_test(spot, events, cfg)
    if cfg.variant == "naive":
        return naive_test(spot, events, cfg)
    return multiple_test(spot, events, cfg)
