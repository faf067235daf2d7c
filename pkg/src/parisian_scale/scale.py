"""Scale-function family, classical and Parisian, as exact exponential mixtures.

Everything here is built from the partial-fraction inversion of the first
scale function,

    W_q(x) = sum_j e^{theta_j x} / kappa'(theta_j),

the theta_j being the roots of kappa(theta) = q.  The second scale function
and its relatives are exact Dickson-Hipp transforms of W_q; the Parisian pair
blends two second-scale evaluations at Phi_{q+r}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import QZero, UnsupportedPenalty
from .expmix import ExpMix
from .model import (
    LevyModel,
    laplace_exponent,
    laplace_exponent_deriv,
    phi,
    root_set,
)

INF = math.inf

# relative tolerance deciding that kappa(theta) hits the killing rate exactly
# (theta = Phi_q), where the Dickson-Hipp factor vanishes
_ONROOT_RTOL = 1e-12
# spec'd switch to the removable-singularity limit of Z_{q,r} at Phi_{q+r}
_PARISIAN_SING_RTOL = 1e-8


@dataclass(frozen=True)
class ScaleContext:
    """(model, q) with precomputed roots and the W_q exponential mixture."""

    model: LevyModel
    q: float
    roots: tuple[complex, ...]
    phi_q: float
    W: ExpMix

    @property
    def Wbar(self) -> ExpMix:
        return _wbar_mix(self)

    @property
    def Z0(self) -> ExpMix:
        """Z_q(x) = 1 + q Wbar_q(x)."""
        return _z0_mix(self)

    @property
    def Zbar(self) -> ExpMix:
        return _zbar_mix(self)

    @property
    def Z1(self) -> ExpMix:
        """Z_{1,q}(x) = Zbar_q(x) - p Wbar_q(x)."""
        return _z1_mix(self)


@dataclass(frozen=True)
class ParisianContext:
    """(model, q, r) with the Phi_{q+r} ingredient of the Parisian pair."""

    model: LevyModel
    q: float
    r: float
    base: ScaleContext
    phi_qr: float


def build_scale(model: LevyModel, q: float) -> ScaleContext:
    """Assemble the partial-fraction form of W_q."""
    roots = tuple(root_set(model, q))
    terms = [(1.0 / laplace_exponent_deriv(model, rho), rho, 0) for rho in roots]
    return ScaleContext(
        model=model, q=float(q), roots=roots, phi_q=float(roots[0].real), W=ExpMix.build(terms)
    )


def build_parisian(model: LevyModel, q: float, r: float) -> ParisianContext:
    if r <= 0:
        raise ValueError("Parisian observation rate r must be positive")
    base = build_scale(model, q)
    return ParisianContext(model=model, q=float(q), r=float(r), base=base, phi_qr=phi(model, q + r))


@lru_cache(maxsize=512)
def _wbar_mix(ctx: ScaleContext) -> ExpMix:
    return ctx.W.antiderivative()


@lru_cache(maxsize=512)
def _z0_mix(ctx: ScaleContext) -> ExpMix:
    return ExpMix.constant(1.0) + _wbar_mix(ctx).scaled(ctx.q)


@lru_cache(maxsize=512)
def _zbar_mix(ctx: ScaleContext) -> ExpMix:
    return _z0_mix(ctx).antiderivative()


@lru_cache(maxsize=512)
def _z1_mix(ctx: ScaleContext) -> ExpMix:
    return _zbar_mix(ctx) - _wbar_mix(ctx).scaled(ctx.model.drift)


_NEAR_ROOT_RTOL = 1e-7


@lru_cache(maxsize=2048)
def z_mix(ctx: ScaleContext, theta: float) -> ExpMix:
    """Z_q(., theta) on x >= 0 as an exponential mixture.

    Since int_0^inf e^{-theta y} W_q(y) dy = 1 / (kappa(theta) - q) as
    rational functions, the e^{theta x} coefficient vanishes identically
    and Z_q(x, theta) = sum_j w_j (kappa(theta)-q) / (theta - rho_j)
    e^{rho_j x}.  The pure-mixture form stays stable for large theta,
    where any rounding residue on e^{theta x} would be catastrophic.
    Each coefficient has a removable singularity at theta = rho_j
    (there kappa - q vanishes too); near a root it is replaced by its
    Taylor limit w_j (kappa'(rho_j) + d kappa''(rho_j) / 2).
    """
    kq = laplace_exponent(ctx.model, theta).real - ctx.q
    terms = []
    for w, rho, _ in ctx.W.terms:
        d = complex(theta) - rho
        if abs(d) <= _NEAR_ROOT_RTOL * (1.0 + abs(theta) + abs(rho)):
            kp = laplace_exponent_deriv(ctx.model, rho)
            kpp = laplace_exponent_deriv(ctx.model, rho, order=2)
            terms.append((w * (kp + 0.5 * d * kpp), rho, 0))
        else:
            terms.append((w * kq / d, rho, 0))
    return ExpMix.build(terms)


@lru_cache(maxsize=2048)
def dz_dtheta_mix(ctx: ScaleContext, theta: float) -> ExpMix:
    """d/dtheta of Z_q(., theta), exact, as a mixture over the rho_j.

    Differentiates the coefficients of z_mix in theta; the rates are
    fixed, so no x e^{theta x} term ever arises.  Near theta = rho_j
    the coefficient derivative tends to w_j kappa''(rho_j) / 2.
    """
    kq = laplace_exponent(ctx.model, theta).real - ctx.q
    kp_t = laplace_exponent_deriv(ctx.model, theta).real
    terms = []
    for w, rho, _ in ctx.W.terms:
        d = complex(theta) - rho
        if abs(d) <= _NEAR_ROOT_RTOL * (1.0 + abs(theta) + abs(rho)):
            kpp = laplace_exponent_deriv(ctx.model, rho, order=2)
            kppp = laplace_exponent_deriv(ctx.model, rho, order=3)
            terms.append((w * (0.5 * kpp + d * kppp / 3.0), rho, 0))
        else:
            terms.append((w * (kp_t * d - kq) / d**2, rho, 0))
    return ExpMix.build(terms)


def eval_W(ctx: ScaleContext, x: float, deriv_order: int = 0) -> float:
    """W_q^{(k)}(x) for x >= 0, k in {0, 1, 2}; right limits at 0."""
    if x < 0:
        raise ValueError("eval_W expects x >= 0 (W vanishes on the negative axis)")
    mix = ctx.W
    for _ in range(deriv_order):
        mix = mix.derivative()
    return mix(x)


def eval_Wbar(ctx: ScaleContext, x: float) -> float:
    if x <= 0:
        return 0.0
    return ctx.Wbar(x)


def eval_Z(ctx: ScaleContext, x: float, theta: float, dtheta: int = 0) -> float:
    """Second scale function Z_q(x, theta); exterior value e^{theta x} for x <= 0."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if x <= 0:
        return x * math.exp(theta * x) if dtheta == 1 else math.exp(theta * x)
    mix = dz_dtheta_mix(ctx, theta) if dtheta == 1 else z_mix(ctx, theta)
    return mix(x)


def eval_Z0_family(ctx: ScaleContext, x: float, kind: str) -> float:
    """Z_q(x), Zbar_q(x) or Z_{1,q}(x) for x >= 0."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if kind == "Z":
        return ctx.Z0(x)
    if kind == "Zbar":
        return ctx.Zbar(x)
    if kind == "Z1":
        return ctx.Z1(x)
    raise ValueError(f"unknown kind {kind!r}")


def parisian_W_mix(pctx: ParisianContext) -> ExpMix:
    """W_{q,r}(.) = Z_q(., Phi_{q+r})."""
    return z_mix(pctx.base, pctx.phi_qr)


def parisian_Z_mix(pctx: ParisianContext, theta: float) -> ExpMix:
    """Z_{q,r}(., theta) as a mixture; theta = INF gives W_{q,r}."""
    if theta == INF:
        return parisian_W_mix(pctx)
    q, r = pctx.q, pctx.r
    k = laplace_exponent(pctx.model, theta).real
    denom = q + r - k
    w_mix = parisian_W_mix(pctx)
    if abs(denom) < _PARISIAN_SING_RTOL * (q + r):
        kp_star = laplace_exponent_deriv(pctx.model, pctx.phi_qr).real
        return w_mix - dz_dtheta_mix(pctx.base, pctx.phi_qr).scaled(r / kp_star)
    return z_mix(pctx.base, theta).scaled(r / denom) + w_mix.scaled((q - k) / denom)


def eval_parisian_Z(pctx: ParisianContext, x: float, theta: float, deriv_x: int = 0) -> float:
    """Z_{q,r}(x, theta) and its x-derivatives; theta = INF evaluates W_{q,r}."""
    if theta != INF and theta < 0:
        raise ValueError("theta must be nonnegative")
    if x < 0:
        raise ValueError("x must be nonnegative")
    mix = parisian_Z_mix(pctx, theta)
    for _ in range(deriv_x):
        mix = mix.derivative()
    return mix(x)


def scriptS_mix(pctx: ParisianContext, deriv_x: int = 0) -> ExpMix:
    """Expected-bailout ingredient S(x) = r/(q+r) * (Zbar_q(x) + kappa'(0+)/q)."""
    q, r = pctx.q, pctx.r
    if q <= 0:
        raise QZero("the bailout ingredient S requires q > 0")
    f = r / (q + r)
    if deriv_x == 0:
        return (pctx.base.Zbar + ExpMix.constant(pctx.model.drift / q)).scaled(f)
    if deriv_x == 1:
        return pctx.base.Z0.scaled(f)
    if deriv_x == 2:
        return pctx.base.W.scaled(f * q)
    raise ValueError("deriv_x must be 0, 1 or 2")


def eval_scriptS(pctx: ParisianContext, x: float, deriv_x: int = 0) -> float:
    return scriptS_mix(pctx, deriv_x)(x)


# ---------------------------------------------------------------------------
# Penalty specifications and the smooth Gerber-Shiu assembly
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Exponential:
    """w(x) = e^{theta x} on x <= 0."""

    theta: float


@dataclass(frozen=True)
class Linear:
    """w(x) = k x + K on x <= 0."""

    k: float
    K: float


@dataclass(frozen=True)
class Constant:
    """w(x) = K on x <= 0."""

    K: float


PenaltySpec = Exponential | Linear | Constant


@dataclass(frozen=True)
class GerberShiu:
    """Smooth harmonic function fitting an exterior penalty w.

    Evaluates the closed-form mixture on x >= 0 and the penalty itself on
    x < 0; ``deriv`` gives exact x-derivatives of the interior part.
    """

    ctx: ScaleContext
    penalty: PenaltySpec
    mix: ExpMix

    def __call__(self, x: float) -> float:
        if x < 0:
            return self.penalty_value(x)
        return self.mix(x)

    def deriv(self, x: float, order: int = 1) -> float:
        mix = self.mix
        for _ in range(order):
            mix = mix.derivative()
        return mix(x)

    def penalty_value(self, x: float) -> float:
        w = self.penalty
        if isinstance(w, Exponential):
            return math.exp(w.theta * x)
        if isinstance(w, Linear):
            return w.k * x + w.K
        return w.K


def build_gerber_shiu(ctx: ScaleContext, penalty: PenaltySpec) -> GerberShiu:
    """Closed-form Gerber-Shiu function for the supported penalty family."""
    if isinstance(penalty, Exponential):
        if penalty.theta < 0:
            raise UnsupportedPenalty("exponential penalty needs theta >= 0")
        mix = z_mix(ctx, penalty.theta)
    elif isinstance(penalty, Linear):
        mix = ctx.Z1.scaled(penalty.k) + ctx.Z0.scaled(penalty.K)
    elif isinstance(penalty, Constant):
        mix = ctx.Z0.scaled(penalty.K)
    else:
        raise UnsupportedPenalty(f"penalty {penalty!r} has no closed form here")
    return GerberShiu(ctx=ctx, penalty=penalty, mix=mix)
