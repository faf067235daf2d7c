"""Dividend and bailout optimization on top of the scale calculus.

Barrier value functions, the barrier influence function G and its last
global maximizer, the efficiency threshold k(q, r) with its patience
solver, and the claims-line network helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    DomainError,
    NoSolution,
    QZero,
    RetentionOutOfRange,
)
from .model import LevyModel, phi
from .scale import (
    Constant,
    ParisianContext,
    PenaltySpec,
    ScaleContext,
    build_gerber_shiu,
    eval_parisian_Z,
    eval_scriptS,
    eval_W,
    eval_Z,
    eval_Z0_family,
)

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def vf_dividends_classic(ctx: ScaleContext, x: float, b: float) -> float:
    """Expected discounted dividends at barrier b until ruin: W_q(x)/W_q'(b)."""
    if not 0.0 <= x <= b:
        raise DomainError(f"need 0 <= x <= b, got x={x}, b={b}")
    return eval_W(ctx, x) / eval_W(ctx, b, deriv_order=1)


def value_definetti(ctx: ScaleContext, x: float, b: float, penalty: PenaltySpec) -> float:
    """Barrier dividend value with a terminal penalty (Dickson-Waters form).

    For x <= b the value is S_w(x) + W_q(x) (1 - S_w'(b)) / W_q'(b) where
    S_w is the smooth harmonic extension of the penalty w.  Above the
    barrier the excess is paid out immediately as a lump sum.
    """
    if x < 0 or b < 0:
        raise DomainError(f"need x >= 0 and b >= 0, got x={x}, b={b}")
    if x > b:
        return x - b + value_definetti(ctx, b, b, penalty)
    gs = build_gerber_shiu(ctx, penalty)
    return gs(x) + eval_W(ctx, x) * (1.0 - gs.deriv(b, 1)) / eval_W(ctx, b, deriv_order=1)


def barrier_function(
    kind: str,
    ctx,
    b: float,
    k: float = 0.0,
    penalty: PenaltySpec | None = None,
) -> float:
    """Barrier influence function G(b) whose last global max locates b*.

    kind selects the objective: "deFinetti_classic" (terminal penalty,
    pass `penalty`), "SLG_classic" (reduced form G~, pass cost `k`), or
    "SLG_parisian" (pass cost `k`, ctx must be a ParisianContext).
    """
    if b < 0:
        raise DomainError(f"need b >= 0, got b={b}")
    if kind == "deFinetti_classic":
        gs = build_gerber_shiu(ctx, penalty if penalty is not None else Constant(0.0))
        return (1.0 - gs.deriv(b, 1)) / eval_W(ctx, b, deriv_order=1)
    if kind == "SLG_classic":
        if ctx.q <= 0:
            raise QZero("SLG barrier function needs q > 0")
        num = 1.0 - k * eval_Z0_family(ctx, b, "Z")
        den = ctx.q * eval_W(ctx, b)
        if den == 0.0:
            # only possible at b=0 with sigma > 0; take the W'(0+) limit
            if abs(num) < 1e-14:
                return 0.0
            return math.copysign(math.inf, num)
        return num / den
    if kind == "SLG_parisian":
        return (1.0 - k * eval_scriptS(ctx, b, 1)) / eval_parisian_Z(ctx, b, 0.0, deriv_x=1)
    raise DomainError(f"unknown barrier function kind {kind!r}")


@dataclass(frozen=True)
class BarrierSolution:
    b_star: float
    G_at_b_star: float
    is_boundary: bool
    grid: tuple = field(repr=False, default=())
    refinement_tol: float = 1e-8


def optimize_barrier(G, b_max: float, n_grid: int = 1000, tol: float = 1e-8) -> BarrierSolution:
    """Last global maximizer of G on [0, b_max].

    Coarse grid scan (ties broken toward larger b, since barrier
    functions can plateau) followed by golden-section refinement of the
    bracketing cell.  Raises NoSolution if G is still increasing at
    b_max, so a truncated search is never reported as an optimum.
    """
    if b_max <= 0:
        raise DomainError(f"need b_max > 0, got {b_max}")
    bs = [b_max * i / n_grid for i in range(n_grid + 1)]
    vals = [G(b) for b in bs]
    best = max(range(len(bs)), key=lambda i: (vals[i], i))
    if best == len(bs) - 1 and vals[-1] > vals[-2]:
        raise NoSolution(
            f"barrier function still increasing at b_max={b_max}; enlarge the search interval"
        )
    lo = bs[max(best - 1, 0)]
    hi = bs[min(best + 1, len(bs) - 1)]
    # golden section for the last maximum: on ties keep the right subinterval
    a, d = lo, hi
    c1 = d - _GOLD * (d - a)
    c2 = a + _GOLD * (d - a)
    f1, f2 = G(c1), G(c2)
    while d - a > tol:
        if f1 > f2:
            d, c2, f2 = c2, c1, f1
            c1 = d - _GOLD * (d - a)
            f1 = G(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLD * (d - a)
            f2 = G(c2)
    b_star = 0.5 * (a + d)
    if b_star < tol:
        b_star = 0.0
    g_star = G(b_star)
    # a boundary solution at 0 can be shadowed by grid granularity
    g0 = vals[0]
    if g0 >= g_star and best == 0:
        b_star, g_star = 0.0, g0
    return BarrierSolution(
        b_star=b_star,
        G_at_b_star=g_star,
        is_boundary=(b_star == 0.0),
        grid=tuple(zip(bs, vals)),
        refinement_tol=tol,
    )


def value_slg_classic(ctx: ScaleContext, x: float, b: float, k: float) -> float:
    """Dividends minus k times injections for the doubly reflected process."""
    if not 0.0 <= x <= b:
        raise DomainError(f"need 0 <= x <= b, got x={x}, b={b}")
    if ctx.q <= 0:
        raise QZero("SLG value needs q > 0")
    q = ctx.q
    Zx = eval_Z0_family(ctx, x, "Z")
    Zb = eval_Z0_family(ctx, b, "Z")
    lx = eval_Z0_family(ctx, x, "Zbar") + ctx.model.drift / q
    return k * lx + Zx * (1.0 - k * Zb) / (q * eval_W(ctx, b))


def value_parisian(pctx: ParisianContext, x: float, b: float, part: str, theta: float = 0.0) -> float:
    """One component of the Parisian barrier objective.

    VF_* parts reflect the surplus at 0 via Poissonian injections and pay
    dividends at b; VS_* parts are the SLG decomposition pieces.
    """
    if not 0.0 <= x <= b:
        raise DomainError(f"need 0 <= x <= b, got x={x}, b={b}")
    if pctx.q <= 0:
        raise QZero("Parisian barrier values need q > 0")
    if part == "VF_div":
        return eval_parisian_Z(pctx, x, math.inf) / eval_parisian_Z(pctx, b, math.inf, deriv_x=1)
    if part == "VF_bail":
        Zx = eval_parisian_Z(pctx, x, 0.0)
        Zb = eval_parisian_Z(pctx, b, 0.0)
        return Zx * eval_scriptS(pctx, b) / Zb - eval_scriptS(pctx, x)
    if part == "VS_div":
        return eval_parisian_Z(pctx, x, 0.0) / eval_parisian_Z(pctx, b, 0.0, deriv_x=1)
    if part == "VS_div_theta":
        return eval_parisian_Z(pctx, x, theta) / eval_parisian_Z(pctx, b, theta, deriv_x=1)
    if part == "VS_bail":
        Zx = eval_parisian_Z(pctx, x, 0.0)
        dZb = eval_parisian_Z(pctx, b, 0.0, deriv_x=1)
        return Zx * eval_scriptS(pctx, b, 1) / dZb - eval_scriptS(pctx, x)
    raise DomainError(f"unknown Parisian value part {part!r}")


def slg_parisian_value(pctx: ParisianContext, x: float, b: float, k: float) -> float:
    """SLG value with Parisian reflection: k S(x) + Z_{q,r}(x)(1 - k S'(b))/Z_{q,r}'(b)."""
    if not 0.0 <= x <= b:
        raise DomainError(f"need 0 <= x <= b, got x={x}, b={b}")
    if pctx.q <= 0:
        raise QZero("SLG value needs q > 0")
    Zx = eval_parisian_Z(pctx, x, 0.0)
    dZb = eval_parisian_Z(pctx, b, 0.0, deriv_x=1)
    return k * eval_scriptS(pctx, x) + Zx * (1.0 - k * eval_scriptS(pctx, b, 1)) / dZb


def _threshold(model: LevyModel, q: float, r: float) -> float:
    w0 = 0.0 if model.sigma2 > 0 else 1.0 / model.c
    phi_qr = phi(model, q + r)
    den = phi_qr - (r + q) * w0
    if den <= 0.0:
        return math.inf
    return (1.0 + q / r) * (phi_qr - r * w0) / den


def efficiency_index(pctx: ParisianContext) -> float:
    """Largest bailout cost k for which an immediate-dividend policy stays optimal.

    Returns +inf when the denominator of the closed ratio is nonpositive
    (every cost is then efficient).
    """
    if pctx.q <= 0 or pctx.r <= 0:
        raise DomainError("efficiency index needs q > 0 and r > 0")
    return _threshold(pctx.model, pctx.q, pctx.r)


def is_efficient(pctx: ParisianContext, k: float) -> bool:
    return k <= efficiency_index(pctx)


def solve_patience(pctx: ParisianContext, k: float, tol: float = 1e-8) -> float:
    """Smallest extra killing rate q' making cost k efficient at discount q+q'.

    The threshold k(q, r) is increasing in q, so bisection applies once an
    efficient upper bound is bracketed by doubling.
    """
    model, q, r = pctx.model, pctx.q, pctx.r
    if k <= _threshold(model, q, r):
        return 0.0
    hi = q
    cap = q * 2.0**60
    while _threshold(model, q + hi, r) < k:
        hi *= 2.0
        if hi > cap:
            raise NoSolution(
                f"no extra killing below {cap} makes k={k} efficient; threshold not increasing?"
            )
    lo = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        km = _threshold(model, q + mid, r)
        if abs(km - k) <= tol * k:
            return mid
        if km < k:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, hi):
            return hi


@dataclass(frozen=True)
class Subsidiary:
    premium: float
    lam: float
    phases: tuple
    retention: float


@dataclass(frozen=True)
class NetworkSpec:
    """Central branch reinsuring I subsidiaries at proportional retentions."""

    subsidiaries: tuple
    c0: float
    q: float

    def __post_init__(self):
        for s in self.subsidiaries:
            if not 0.0 < s.retention < 1.0:
                raise RetentionOutOfRange(f"retention {s.retention} outside (0, 1)")

    @property
    def gamma(self) -> float:
        return sum(s.retention / (1.0 - s.retention) for s in self.subsidiaries)

    @property
    def c_tilde(self) -> float:
        return self.gamma * sum(
            s.premium * (1.0 - s.retention) / s.retention for s in self.subsidiaries
        )

    @property
    def cheap(self) -> bool:
        return all(
            self.c0 <= s.premium * (1.0 - s.retention) / s.retention
            for s in self.subsidiaries
        )


def network_check(spec: NetworkSpec) -> dict:
    return {"cheap": spec.cheap, "gamma": spec.gamma, "c_tilde": spec.c_tilde}


def network_claims_line(spec: NetworkSpec, u0: float) -> list:
    """Subsidiary reserves on the claims line through central reserve u0."""
    return [u0 * s.retention / (1.0 - s.retention) for s in spec.subsidiaries]


def network_value_mc(spec: NetworkSpec, u0: float, b: float, horizon: float | None = None,
                     n_paths: int = 100_000, seed: int = 0):
    from .mc import network_estimate

    return network_estimate(spec, u0, b, horizon=horizon, n_paths=n_paths, seed=seed)
