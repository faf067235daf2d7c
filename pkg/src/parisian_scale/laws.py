"""Closed-form first-passage laws, classical and Parisian.

Every function is a pure evaluation of scale-function ratios on an immutable
context.  Transform-type results are Laplace transforms of nonnegative
functionals and therefore live in [0, 1] for nonnegative arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, NonpositiveDrift, QZero
from .model import laplace_exponent, laplace_exponent_deriv, phi as _phi
from .scale import (
    INF,
    GerberShiu,
    ParisianContext,
    PenaltySpec,
    ScaleContext,
    build_gerber_shiu,
    eval_parisian_Z,
    eval_Z,
    parisian_W_mix,
    parisian_Z_mix,
    z_mix,
)


@dataclass(frozen=True)
class LawResult:
    """A law value plus named intermediates for diagnostics."""

    value: float
    components: dict = field(default_factory=dict)


def _check_interval(x: float, a: float, b: float):
    if not (a <= x <= b) or not a < b:
        raise DomainError(f"need a <= x <= b with a < b, got x={x}, a={a}, b={b}")


def z_deriv(ctx: ScaleContext, x: float, theta: float) -> float:
    """Z'_q(x, theta) = theta Z_q(x, theta) + (q - kappa(theta)) W_q(x)."""
    k = laplace_exponent(ctx.model, theta).real
    return theta * eval_Z(ctx, x, theta) + (ctx.q - k) * ctx.W(x)


def two_sided_exit(ctx: ScaleContext, x: float, a: float, b: float) -> float:
    """E_x[e^{-q tau_b^+}; up-crossing of b before down-crossing of a]."""
    _check_interval(x, a, b)
    return ctx.W(x - a) / ctx.W(b - a)


def severity_absorbed(ctx: ScaleContext, x: float, b: float, theta: float) -> float:
    """Joint transform of ruin time and undershoot, absorbed at b."""
    _check_interval(x, 0.0, b)
    return eval_Z(ctx, x, theta) - ctx.W(x) / ctx.W(b) * eval_Z(ctx, b, theta)


def severity_reflected(ctx: ScaleContext, x: float, b: float, theta: float) -> float:
    """Joint transform of ruin time and undershoot, with dividends at b."""
    _check_interval(x, 0.0, b)
    return eval_Z(ctx, x, theta) - ctx.W(x) * z_deriv(ctx, b, theta) / ctx.W.derivative()(b)


def severity_infinite(ctx: ScaleContext, x: float, theta: float, mode: str = "ruin") -> float:
    """Infinite-horizon ruin-time / recovery-time transform."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    if ctx.q <= 0 and ctx.phi_q <= 0:
        raise QZero("the q -> 0 limit is not provided")
    if mode == "recovery":
        return eval_Z(ctx, x, ctx.phi_q) - ctx.q * ctx.W(x) / ctx.phi_q
    if mode != "ruin":
        raise ValueError(f"unknown mode {mode!r}")
    k = laplace_exponent(ctx.model, theta).real
    if abs(theta - ctx.phi_q) < 1e-9:
        slope = laplace_exponent_deriv(ctx.model, ctx.phi_q).real
    else:
        slope = (k - ctx.q) / (theta - ctx.phi_q)
    return eval_Z(ctx, x, theta) - ctx.W(x) * slope


def bailouts_to_level(ctx: ScaleContext, x: float, b: float, theta: float) -> float:
    """Transform of time and injections for the 0-reflected process to reach b."""
    _check_interval(x, 0.0, b)
    if theta == INF:
        return ctx.W(x) / ctx.W(b)
    return eval_Z(ctx, x, theta) / eval_Z(ctx, b, theta)


def dividends_penalty_classic(
    ctx: ScaleContext, x: float, b: float, theta: float, vartheta: float
) -> float:
    """Joint dividends-and-severity transform for the process reflected at b."""
    _check_interval(x, 0.0, b)
    if vartheta < 0:
        raise DomainError("vartheta must be nonnegative")
    num = z_deriv(ctx, b, theta) + vartheta * eval_Z(ctx, b, theta)
    den = ctx.W.derivative()(b) + vartheta * ctx.W(b)
    return eval_Z(ctx, x, theta) - ctx.W(x) * num / den


def gs_exit(
    ctx: ScaleContext,
    x: float,
    b: float,
    penalty: PenaltySpec | GerberShiu,
    boundary: str = "absorbed",
) -> float:
    """Penalty-at-ruin transform with absorption or reflection at b."""
    _check_interval(x, 0.0, b)
    gs = penalty if isinstance(penalty, GerberShiu) else build_gerber_shiu(ctx, penalty)
    if boundary == "absorbed":
        return gs(x) - ctx.W(x) * gs(b) / ctx.W(b)
    if boundary == "reflected":
        return gs(x) - ctx.W(x) * gs.deriv(b) / ctx.W.derivative()(b)
    raise ValueError(f"unknown boundary {boundary!r}")


def time_in_red(ctx_q0: ScaleContext, x: float, r: float) -> float:
    """E_x[e^{-r * total time below zero}] for the free process, q = 0."""
    if ctx_q0.q != 0:
        raise ValueError("time_in_red needs the q = 0 context")
    if r <= 0:
        raise ValueError("r must be positive")
    if x < 0:
        raise DomainError("x must be nonnegative")
    p = ctx_q0.model.drift
    if p <= 0:
        raise NonpositiveDrift("requires strictly positive drift")
    phi_r = _phi(ctx_q0.model, r)
    return p * phi_r / r * eval_Z(ctx_q0, x, phi_r)


# ---------------------------------------------------------------------------
# Parisian laws (Poisson-observed insolvency)
# ---------------------------------------------------------------------------
def parisian_up_exit(pctx: ParisianContext, x: float, b: float, theta: float) -> float:
    """Transform of time/injections for Parisian reflection to reach b.

    theta = INF is the no-insolvency up-crossing E_x[e^{-q tau_b^+}; tau_b^+ < T_0^-].
    """
    _check_interval(x, 0.0, b)
    mix = parisian_Z_mix(pctx, theta)
    return mix(x) / mix(b)


def parisian_severity(pctx: ParisianContext, x: float, b: float, theta: float) -> float:
    """Severity of Parisian ruin with absorption at b."""
    _check_interval(x, 0.0, b)
    w = parisian_W_mix(pctx)
    return eval_parisian_Z(pctx, x, theta) - w(x) / w(b) * eval_parisian_Z(pctx, b, theta)


def parisian_resolvent(pctx: ParisianContext, x: float, a: float, b: float, y: float) -> float:
    """Resolvent density at y of the doubly absorbed Parisian process."""
    _check_interval(x, a, b)
    if not a < y < b:
        raise DomainError("need a < y < b")
    w = parisian_W_mix(pctx)
    val = w(x - a) * w(b - y) / w(b - a)
    if y < x:
        val -= w(x - y)
    return val


def parisian_resolvent_integral(pctx: ParisianContext, x: float, a: float, b: float) -> float:
    """Exact int_a^b of the resolvent density, via mixture antiderivatives."""
    _check_interval(x, a, b)
    wbar = parisian_W_mix(pctx).antiderivative()
    w = parisian_W_mix(pctx)
    return w(x - a) * wbar(b - a) / w(b - a) - wbar(x - a)


def omega(pctx: ParisianContext, b: float) -> float:
    """Rate of the exponential dividends-at-ruin factorization.

    Omega = W'_{q,r}(b)/W_{q,r}(b) = Phi_{q+r} - r W_q(b)/Z_q(b, Phi_{q+r}).
    """
    if b < 0:
        raise DomainError("b must be nonnegative")
    w = parisian_W_mix(pctx)
    return w.derivative()(b) / w(b)


def parisian_dividends_penalty(
    pctx: ParisianContext, x: float, b: float, theta: float, vartheta: float
) -> float:
    """Dividends-penalty law under Parisian ruin, reflected at b."""
    _check_interval(x, 0.0, b)
    if vartheta < 0:
        raise DomainError("vartheta must be nonnegative")
    zm = parisian_Z_mix(pctx, theta)
    wm = parisian_W_mix(pctx)
    num = zm.derivative()(b) + vartheta * zm(b)
    den = wm.derivative()(b) + vartheta * wm(b)
    return zm(x) - wm(x) * num / den


def parisian_dividends_penalty_factorized(
    pctx: ParisianContext, b: float, theta: float, vartheta: float
) -> float:
    """Equivalent x = b form via the Omega factorization (consistency check)."""
    if b < 0:
        raise DomainError("b must be nonnegative")
    ctx = pctx.base
    q, r = pctx.q, pctx.r
    k = laplace_exponent(pctx.model, theta).real
    om = omega(pctx, b)
    inner = eval_Z(ctx, b, theta) - (
        theta * eval_Z(ctx, b, theta) + (q - k) * ctx.W(b)
    ) / om
    return om / (om + vartheta) * inner * r / (r + q - k)


def fundamental_identity_residual(
    ctx: ScaleContext, x: float, b: float, theta: float
) -> float:
    """Residual of Z(x)/Z(b) - W(x)/W(b) - S(x,b)/Z(b); zero by the exit-law algebra."""
    zb = eval_Z(ctx, b, theta)
    return (
        eval_Z(ctx, x, theta) / zb
        - ctx.W(x) / ctx.W(b)
        - severity_absorbed(ctx, x, b, theta) / zb
    )
