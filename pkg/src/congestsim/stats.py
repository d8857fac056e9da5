"""Between-groups ANOVA, Tukey HSD post-hoc, and Pearson correlation.

The ANOVA is the standard fixed-effects sums-of-squares decomposition on a
balanced full-factorial design; interaction terms stay in the model (the
error term is the within-cell sum of squares) and only main effects are
reported. Tail probabilities come from the regularized incomplete beta via
scipy.special; the studentized-range critical value is evaluated
numerically by scipy.stats (no hard-coded tables).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from scipy import special
from scipy import stats as _scipy_stats


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class AnovaEffect:
    effect: str
    f: float
    df_effect: int
    df_error: int
    p: float


@dataclass(frozen=True)
class AnovaResult:
    effects: tuple[AnovaEffect, ...]
    ss_total: float
    ss_error: float

    def effect(self, name: str) -> AnovaEffect:
        for e in self.effects:
            if e.effect == name:
                return e
        raise KeyError(name)


@dataclass(frozen=True)
class TukeyPair:
    group_a: str
    group_b: str
    mean_difference: float
    q: float
    significant: bool


@dataclass(frozen=True)
class TukeyResult:
    alpha: float
    q_critical: float
    pairs: tuple[TukeyPair, ...]

    def pair(self, a: str, b: str) -> TukeyPair:
        for p in self.pairs:
            if {p.group_a, p.group_b} == {a, b}:
                return p
        raise KeyError((a, b))


@dataclass(frozen=True)
class PearsonResult:
    r: float
    n: int
    p: float


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail of the F distribution via the regularized incomplete beta."""
    if math.isinf(f):
        return 0.0
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return float(special.betainc(df2 / 2.0, df1 / 2.0, x))


def t_sf(t: float, df: int) -> float:
    """Upper tail of Student's t."""
    return float(special.stdtr(df, -t))


def anova_between_groups(observations, factors) -> AnovaResult:
    """Main-effect F and p per factor on a balanced factorial design.

    observations: iterable of (factor-levels tuple, value). factors: two or
    three factor names. Every cell of the full factorial must appear with
    the same number (>= 2) of observations.
    """
    factors = list(factors)
    if len(factors) not in (2, 3):
        raise StatsError("between-groups ANOVA supports 2 or 3 factors")
    obs = [(tuple(levels), float(v)) for levels, v in observations]
    if not obs:
        raise StatsError("no observations")
    k = len(factors)
    if any(len(levels) != k for levels, _ in obs):
        raise StatsError("level tuple length does not match factor count")

    levels_per_factor = [sorted({levels[i] for levels, _ in obs}, key=repr)
                         for i in range(k)]
    for name, lv in zip(factors, levels_per_factor):
        if len(lv) < 2:
            raise StatsError(f"factor {name!r} has a single level")

    cells: dict[tuple, list[float]] = {}
    for levels, v in obs:
        cells.setdefault(levels, []).append(v)
    for combo in product(*levels_per_factor):
        if combo not in cells:
            raise StatsError(f"empty cell {combo}")
    sizes = {len(vs) for vs in cells.values()}
    if len(sizes) != 1:
        raise StatsError("unbalanced design: cell sizes differ")
    n_cell = sizes.pop()
    if n_cell < 2:
        raise StatsError("need at least 2 observations per cell")

    values = [v for _, v in obs]
    n_total = len(values)
    grand = sum(values) / n_total
    ss_total = sum((v - grand) ** 2 for v in values)
    ss_error = 0.0
    for vs in cells.values():
        mean = sum(vs) / len(vs)
        ss_error += sum((v - mean) ** 2 for v in vs)
    df_error = n_total - len(cells)
    ms_error = ss_error / df_error if df_error > 0 else 0.0

    effects = []
    for i, name in enumerate(factors):
        ss = 0.0
        for level in levels_per_factor[i]:
            vals = [v for levels, v in obs if levels[i] == level]
            mean = sum(vals) / len(vals)
            ss += len(vals) * (mean - grand) ** 2
        df = len(levels_per_factor[i]) - 1
        if ss <= 0.0:
            f_stat, p = 0.0, 1.0
        elif ms_error == 0.0:
            f_stat, p = math.inf, 0.0
        else:
            f_stat = (ss / df) / ms_error
            p = f_sf(f_stat, df, df_error)
        effects.append(AnovaEffect(name, f_stat, df, df_error, p))
    return AnovaResult(tuple(effects), ss_total, ss_error)


def tukey_hsd(groups: dict[str, list[float]], alpha: float = 0.05) -> TukeyResult:
    """Studentized-range q per group pair; significant iff q exceeds the
    critical value at alpha. Unequal group sizes use the Tukey-Kramer
    denominator."""
    names = list(groups)
    if len(names) < 2:
        raise StatsError("need at least two groups")
    for name in names:
        if len(groups[name]) < 2:
            raise StatsError(f"group {name!r} needs at least 2 values")
    k = len(names)
    n_total = sum(len(groups[g]) for g in names)
    df = n_total - k
    means = {g: sum(groups[g]) / len(groups[g]) for g in names}
    ss_within = sum(
        (v - means[g]) ** 2 for g in names for v in groups[g])
    ms_within = ss_within / df
    q_crit = float(_scipy_stats.studentized_range.ppf(1.0 - alpha, k, df))

    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            a, b = names[i], names[j]
            diff = means[a] - means[b]
            se2 = ms_within / 2.0 * (1.0 / len(groups[a]) + 1.0 / len(groups[b]))
            if se2 > 0.0:
                q = abs(diff) / math.sqrt(se2)
            else:
                q = 0.0 if diff == 0.0 else math.inf
            pairs.append(TukeyPair(a, b, diff, q, bool(q > q_crit)))
    return TukeyResult(alpha, q_crit, tuple(pairs))


def pearson(x, y) -> PearsonResult:
    """Sample correlation with a two-sided p from the t transform."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y):
        raise StatsError("length mismatch")
    n = len(x)
    if n < 3:
        raise StatsError("need at least 3 points")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    if sxx == 0.0 or syy == 0.0:
        raise StatsError("zero variance")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = abs(r) * math.sqrt((n - 2) / (1.0 - r * r))
        p = 2.0 * t_sf(t, n - 2)
    return PearsonResult(r, n, p)
