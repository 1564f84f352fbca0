"""Normal-calibrated baselines and oracle-radius comparisons.

Covers the standard-normal (SNC) interval and its residual-bias coverage
loss, the folded-normal fixed-length interval (FLCI), closed-form oracle
radii for the empirical Bernstein interval, and the rate exponents that
compare CE-optimal robust bias correction with EBCI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize, special

__all__ = [
    "normal_cdf",
    "normal_sf",
    "normal_pdf",
    "normal_quantile",
    "snc_two_sided_coverage",
    "snc_coverage_loss",
    "snc_coverage_loss_lower_bound",
    "folded_normal_cdf",
    "folded_normal_quantile",
    "flci_radius",
    "flci_optimized_radius",
    "ebci_oracle_radius",
    "flci_leading_radius",
    "RadiusComparison",
    "radius_equivalence_report",
    "RateEntry",
    "rate_table",
    "OptimizationError",
]


class OptimizationError(RuntimeError):
    pass


def normal_cdf(x):
    return special.ndtr(x)


def normal_sf(x):
    return special.ndtr(-np.asarray(x, dtype=float))


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(p):
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0.0) | (p_arr >= 1.0)) or np.any(np.isnan(p_arr)):
        raise ValueError(f"quantile level must lie in (0, 1), got {p!r}")
    return special.ndtri(p_arr)


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def snc_two_sided_coverage(alpha: float, a: float) -> float:
    """Exact coverage of ``theta_hat +/- z_{1-alpha/2} sigma`` when the
    normalized residual bias is ``a``: ``Phi(z - a) + Phi(z + a) - 1``."""
    _check_alpha(alpha)
    z = float(normal_quantile(1.0 - alpha / 2.0))
    return float(1.0 - normal_sf(z - a) - normal_sf(z + a))


def snc_coverage_loss(alpha: float, a: float) -> float:
    """``(1 - alpha) - coverage``, evaluated through the tails to avoid cancellation."""
    _check_alpha(alpha)
    z = float(normal_quantile(1.0 - alpha / 2.0))
    upper = float(normal_sf(z - a) - normal_sf(z))
    lower = float(normal_sf(z) - normal_sf(z + a))
    return upper - lower


def snc_coverage_loss_lower_bound(alpha: float, a: float) -> float:
    """Quadratic lower bound ``z phi(z) a**2 / 4`` with ``z = z_{1-alpha/2}``."""
    _check_alpha(alpha)
    z = float(normal_quantile(1.0 - alpha / 2.0))
    return 0.25 * z * float(normal_pdf(z)) * a * a


def folded_normal_cdf(c, t):
    """``P(|N(t, 1)| <= c)``."""
    return normal_cdf(c - t) + normal_cdf(c + t) - 1.0


def folded_normal_quantile(t: float, alpha: float) -> float:
    """``cv_{1-alpha}(t)``, the ``1 - alpha`` quantile of ``|N(t, 1)|``.

    Solves ``P(N > c - t) + P(N > c + t) = alpha`` on ``[0, t + z_{1-alpha/2}]``.
    """
    _check_alpha(alpha)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    t = float(t)
    upper = t + float(normal_quantile(1.0 - alpha / 2.0))

    def excess(c):
        return float(normal_sf(c - t) + normal_sf(c + t)) - alpha

    if excess(upper) >= 0.0:
        return upper
    return optimize.brentq(excess, 0.0, upper, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def flci_radius(se: float, worst_bias: float, alpha: float, side: str = "two") -> float:
    """Half-length of the bias-aware interval.

    Two-sided: ``se * cv_{1-alpha}(worst_bias / se)``; one-sided:
    ``se * z_{1-alpha} + worst_bias``.
    """
    if se <= 0:
        raise ValueError(f"se must be positive, got {se!r}")
    if worst_bias < 0:
        raise ValueError(f"worst_bias must be nonnegative, got {worst_bias!r}")
    if side == "two":
        return se * folded_normal_quantile(worst_bias / se, alpha)
    if side == "one":
        return se * float(normal_quantile(1.0 - alpha)) + worst_bias
    raise ValueError(f"side must be 'one' or 'two', got {side!r}")


def _rate_scale(eta, cv, n, S):
    if eta <= 0 or cv <= 0 or n <= 0:
        raise ValueError(f"need positive eta, cv and n; got eta={eta}, cv={cv}, n={n}")
    p = S / (2 * S + 1)
    return eta ** (1.0 / (2 * S + 1)), cv**p, n ** (-p)


def _leading(eta, cv, n, S, log_term):
    e, c, m = _rate_scale(eta, cv, n, S)
    return (2 * S + 1) * e * (2.0 * log_term / (4.0 * S * S)) ** (S / (2 * S + 1)) * c * m


def _flci_objective_minimum(alpha, S, n_seeds=64):
    z = float(normal_quantile(1.0 - alpha))
    lo, hi = 1e-6, 50.0 * z
    power = -1.0 / (2 * S + 1)

    def objective(t):
        return t**power * folded_normal_quantile(t, alpha)

    seeds = np.geomspace(lo, hi, n_seeds)
    values = np.array([objective(t) for t in seeds])
    j = int(np.argmin(values))
    if j == 0 or j == n_seeds - 1:
        raise OptimizationError(
            f"two-sided FLCI objective minimised at the bracket edge t={seeds[j]:.3g} "
            f"(bracket [{lo:.3g}, {hi:.3g}], alpha={alpha}, S={S})"
        )
    res = optimize.minimize_scalar(
        objective, bracket=(seeds[j - 1], seeds[j], seeds[j + 1]), method="golden",
        tol=1e-8,
    )
    if not res.success or not (seeds[j - 1] <= res.x <= seeds[j + 1]):
        raise OptimizationError(
            f"golden-section search failed in [{seeds[j - 1]:.4g}, {seeds[j + 1]:.4g}]: "
            f"{getattr(res, 'message', '')}"
        )
    return float(res.x), float(res.fun)


def flci_optimized_radius(eta: float, cv: float, n: int, S: int, alpha: float, side: str = "two"):
    """Oracle FLCI radius optimised over the bandwidth.

    Uses ``se(h) = sqrt(cv / (n h))`` and worst-case bias ``eta h**S``.

    Returns
    -------
    radius, h_star, t_star : float
        ``t_star`` is the optimal bias-to-standard-error ratio.
    """
    _check_alpha(alpha)
    e, c, m = _rate_scale(eta, cv, n, S)
    if side == "one":
        z = float(normal_quantile(1.0 - alpha))
        radius = _leading(eta, cv, n, S, 0.5 * z * z)
        h_star = (z * z * cv / (4.0 * S * S * eta * eta * n)) ** (1.0 / (2 * S + 1))
        t_star = eta * h_star**S / math.sqrt(cv / (n * h_star))
        return radius, h_star, t_star
    if side != "two":
        raise ValueError(f"side must be 'one' or 'two', got {side!r}")
    t_star, value = _flci_objective_minimum(alpha, S)
    radius = e * c * m * value
    h_star = (t_star * math.sqrt(cv / n) / eta) ** (2.0 / (2 * S + 1))
    return radius, h_star, t_star


def ebci_oracle_radius(eta: float, cv: float, n: int, S: int, alpha: float, side: str = "two") -> float:
    """Closed-form oracle EBCI radius; two-sided splits ``alpha`` across tails."""
    _check_alpha(alpha)
    if side == "one":
        return _leading(eta, cv, n, S, math.log(1.0 / alpha))
    if side == "two":
        return _leading(eta, cv, n, S, math.log(2.0 / alpha))
    raise ValueError(f"side must be 'one' or 'two', got {side!r}")


def flci_leading_radius(eta: float, cv: float, n: int, S: int, alpha: float) -> float:
    """Small-alpha leading term of the optimised two-sided FLCI radius,
    ``(2S+1) eta**(1/(2S+1)) (2 log(1/alpha) cv / (4 S**2))**(S/(2S+1)) n**(-S/(2S+1))``."""
    _check_alpha(alpha)
    return _leading(eta, cv, n, S, math.log(1.0 / alpha))


@dataclass(frozen=True)
class RadiusComparison:
    alpha: float
    S: int
    eta: float
    cv: float
    n: int
    r_eb_one: float
    r_flci_one: float
    r_eb_two: float
    r_flci_two: float
    r_flci_two_leading: float
    ratio_one: float
    ratio_two: float
    ratio_two_leading: float
    t_star_two: float


def radius_equivalence_report(eta: float, cv: float, n: int, S: int, alphas) -> list[RadiusComparison]:
    """Tabulate one- and two-sided oracle radii of EBCI and FLCI for each alpha.

    ``ratio_two`` divides by the numerically optimised FLCI radius;
    ``ratio_two_leading`` divides by its small-alpha leading term.
    """
    rows = []
    for alpha in alphas:
        r_eb1 = ebci_oracle_radius(eta, cv, n, S, alpha, "one")
        r_fl1, _, _ = flci_optimized_radius(eta, cv, n, S, alpha, "one")
        r_eb2 = ebci_oracle_radius(eta, cv, n, S, alpha, "two")
        r_fl2, _, t2 = flci_optimized_radius(eta, cv, n, S, alpha, "two")
        r_lead = flci_leading_radius(eta, cv, n, S, alpha)
        rows.append(
            RadiusComparison(
                alpha=float(alpha), S=int(S), eta=float(eta), cv=float(cv), n=int(n),
                r_eb_one=r_eb1, r_flci_one=r_fl1, r_eb_two=r_eb2, r_flci_two=r_fl2,
                r_flci_two_leading=r_lead,
                ratio_one=r_eb1 / r_fl1, ratio_two=r_eb2 / r_fl2,
                ratio_two_leading=r_eb2 / r_lead, t_star_two=t2,
            )
        )
    return rows


@dataclass(frozen=True)
class RateEntry:
    """One row of the rate comparison between CE-optimal RBC and EBCI.

    Exponents ``e`` stand for rates ``n**(-e)``. ``applicable`` marks rows whose
    parity matches ``p``; boundary rows apply to every ``p``.
    """

    point: str
    estimand: str
    parity: str
    p: int
    smoothness: int
    rbc_length_exp: Fraction
    rbc_ce_exp: Fraction
    ebci_length_exp: Fraction
    ebci_ce_exp: Fraction
    ebci_ce_note: str
    rbc_moment: str
    ebci_moment: str
    applicable: bool


def _rate_entry(point, estimand, parity, p):
    S = p + 3 if (point == "interior" and parity == "odd") else p + 2
    regression = estimand == "regression"
    return RateEntry(
        point=point,
        estimand=estimand,
        parity=parity,
        p=p,
        smoothness=S,
        rbc_length_exp=Fraction(S, 2 * (S + 1)),
        rbc_ce_exp=Fraction(S, S + 1),
        ebci_length_exp=Fraction(S, 2 * S + 1),
        ebci_ce_exp=Fraction(2 * S, 2 * S + 1),
        ebci_ce_note="or exp." if regression else "exp.",
        rbc_moment=">8" if regression else "-",
        ebci_moment=f">{Fraction(4 * S + 1, S)}" if regression else "-",
        applicable=parity == "n/a" or (parity == "odd") == (p % 2 == 1),
    )


def rate_table(p_values) -> list[RateEntry]:
    """Length and coverage-error exponents for each local-polynomial order ``p``.

    Interior rows use the smoothness ``S = p + 3`` (odd formula) or ``S = p + 2``
    (even formula); boundary rows use ``S = p + 2``. Both parity formulas are
    reported for every ``p``.
    """
    rows = []
    for p in p_values:
        if int(p) != p or p < 1:
            raise ValueError(f"p must be a positive integer, got {p!r}")
        p = int(p)
        for estimand in ("regression", "density"):
            for parity in ("odd", "even"):
                rows.append(_rate_entry("interior", estimand, parity, p))
        for estimand in ("regression", "density"):
            rows.append(_rate_entry("boundary", estimand, "n/a", p))
    return rows
