"""Spectrally negative Levy model with hyperexponential claims.

The surplus process is ``X(t) = x + c t + sigma B(t) - sum of claims``, where
claims arrive at rate ``lam`` and claim sizes follow the hyperexponential
density ``sum_i p_i mu_i exp(-mu_i y)``.  The Laplace exponent is

    kappa(theta) = sigma^2/2 theta^2 + c theta - lam theta sum_i p_i/(mu_i+theta)

which is rational, so the scale-function family has an exact finite
exponential-mixture form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import ConvergenceFailure, DegenerateRoots, ModelError, PoleAtTheta

_POLE_TOL = 1e-12
_ROOT_SEP_RTOL = 1e-8


@dataclass(frozen=True)
class LevyModel:
    """Finite-activity spectrally negative Levy model, immutable after construction.

    Parameters
    ----------
    c : premium (drift) rate.
    sigma2 : Gaussian variance coefficient; ``sigma2/2`` multiplies theta^2.
    lam : claim arrival intensity.
    phases : sequence of ``(weight, rate)`` pairs for the hyperexponential
        claim-size mixture; weights sum to 1, rates positive and distinct.
    """

    c: float
    sigma2: float = 0.0
    lam: float = 0.0
    phases: tuple[tuple[float, float], ...] = ()
    drift: float = field(init=False)

    def __post_init__(self):
        phases = tuple((float(p), float(m)) for p, m in self.phases)
        object.__setattr__(self, "phases", phases)
        if self.sigma2 < 0:
            raise ModelError("sigma2 must be nonnegative")
        if self.lam < 0:
            raise ModelError("lam must be nonnegative")
        if self.lam > 0 and not phases:
            raise ModelError("positive claim intensity requires claim phases")
        if phases:
            weights = np.array([p for p, _ in phases])
            rates = np.array([m for _, m in phases])
            if abs(weights.sum() - 1.0) > 1e-12:
                raise ModelError(f"phase weights sum to {weights.sum()}, not 1")
            if np.any(weights <= 0) or np.any(weights > 1):
                raise ModelError("phase weights must lie in (0, 1]")
            if np.any(rates <= 0):
                raise ModelError("phase rates must be positive")
            for i in range(len(rates)):
                for j in range(i + 1, len(rates)):
                    if abs(rates[i] - rates[j]) <= 1e-9 * max(rates[i], rates[j]):
                        raise ModelError("phase rates must be pairwise distinct")
        if not (self.sigma2 > 0 or self.c > 0):
            raise ModelError("need sigma2 > 0 or c > 0")
        mean_claim = sum(p / m for p, m in phases) if phases else 0.0
        object.__setattr__(self, "drift", self.c - self.lam * mean_claim)

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    @property
    def mean_claim(self) -> float:
        return sum(p / m for p, m in self.phases) if self.phases else 0.0

    @classmethod
    def from_json(cls, path: str) -> "LevyModel":
        """Load a model from the documented JSON schema."""
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "LevyModel":
        phases = tuple((ph["weight"], ph["rate"]) for ph in raw.get("phases", []))
        return cls(
            c=float(raw["c"]),
            sigma2=float(raw.get("sigma2", 0.0)),
            lam=float(raw.get("lambda", 0.0)),
            phases=phases,
        )

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "sigma2": self.sigma2,
            "lambda": self.lam,
            "phases": [{"weight": p, "rate": m} for p, m in self.phases],
        }


def laplace_exponent(model: LevyModel, theta: complex) -> complex:
    """Evaluate kappa(theta); exact real on the real axis, kappa(0) = 0."""
    for _, mu in model.phases:
        if abs(theta + mu) < _POLE_TOL:
            raise PoleAtTheta(f"theta = {theta} is a pole (rate {mu})")
    jump = sum(p / (mu + theta) for p, mu in model.phases)
    val = 0.5 * model.sigma2 * theta**2 + model.c * theta - model.lam * theta * jump
    if isinstance(theta, complex) and theta.imag == 0:
        return val.real
    return val


def laplace_exponent_deriv(model: LevyModel, theta: complex, order: int = 1) -> complex:
    """kappa'(theta) or kappa''(theta)."""
    if order == 1:
        jump = sum(p * mu / (mu + theta) ** 2 for p, mu in model.phases)
        return model.sigma2 * theta + model.c - model.lam * jump
    if order == 2:
        jump = sum(-2.0 * p * mu / (mu + theta) ** 3 for p, mu in model.phases)
        return model.sigma2 - model.lam * jump
    if order == 3:
        jump = sum(6.0 * p * mu / (mu + theta) ** 4 for p, mu in model.phases)
        return -model.lam * jump
    raise ValueError(f"unsupported derivative order {order}")


def drift_mean(model: LevyModel) -> float:
    """kappa'(0+) = c - lam * E[claim]."""
    return model.drift


def _kappa_poly(model: LevyModel, s: float) -> np.polynomial.Polynomial:
    """Numerator polynomial of kappa(theta) - s after clearing the phase poles."""
    P = np.polynomial.Polynomial
    quad = P([-s, model.c, 0.5 * model.sigma2])
    prod_all = P([1.0])
    for _, mu in model.phases:
        prod_all *= P([mu, 1.0])
    poly = quad * prod_all
    for i, (p, _) in enumerate(model.phases):
        prod_others = P([1.0])
        for j, (_, mu_j) in enumerate(model.phases):
            if j != i:
                prod_others *= P([mu_j, 1.0])
        poly -= P([0.0, model.lam * p]) * prod_others
    return poly


def phi(model: LevyModel, s: float) -> float:
    """Right inverse of kappa: the largest nonnegative root of kappa(theta) = s."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    kp0 = drift_mean(model)
    if s == 0 and kp0 >= 0:
        return 0.0
    # kappa is convex and increasing on [Phi_0, infinity); bracket then polish.
    lo = 0.0
    f_lo = -s  # kappa(0) = 0
    if kp0 < 0 and s == 0:
        f_lo = 0.0
    hi = max(1.0, 2.0 * s / max(model.c, 0.5 * model.sigma2, 1e-12))
    for _ in range(200):
        if laplace_exponent(model, hi).real > s:
            break
        hi *= 2.0
    else:
        raise ConvergenceFailure("could not bracket Phi_s")
    if kp0 < 0:
        # start past the interior minimum so the bracket holds a single root
        res = optimize.minimize_scalar(
            lambda t: laplace_exponent(model, t).real, bounds=(0.0, hi), method="bounded"
        )
        lo = res.x
        f_lo = laplace_exponent(model, lo).real - s
        if f_lo > 0:
            raise ConvergenceFailure("bracketing failed below the convexity minimum")
    root = optimize.brentq(
        lambda t: laplace_exponent(model, t).real - s, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200
    )
    # one Newton polish step
    d = laplace_exponent_deriv(model, root).real
    if d != 0:
        root -= (laplace_exponent(model, root).real - s) / d
    return max(root, 0.0)


def root_set(model: LevyModel, s: float) -> list[complex]:
    """All roots of kappa(theta) = s, Newton-polished, Phi_s first.

    Exactly one root has nonnegative real part (it equals ``phi(model, s)``);
    the rest lie in the open left half plane, complex ones in conjugate pairs.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    poly = _kappa_poly(model, s)
    roots = poly.roots()
    polished = []
    for r in roots:
        for _ in range(3):
            f = laplace_exponent(model, r) - s
            d = laplace_exponent_deriv(model, r)
            if abs(d) < 1e-300:
                break
            step = f / d
            r = r - step
            if abs(step) < 1e-15 * (1.0 + abs(r)):
                break
        polished.append(complex(r))
    scale = max(max(abs(r) for r in polished), 1.0)
    for i in range(len(polished)):
        for j in range(i + 1, len(polished)):
            if abs(polished[i] - polished[j]) < _ROOT_SEP_RTOL * scale:
                raise DegenerateRoots(
                    f"roots {polished[i]} and {polished[j]} coincide; perturb the model"
                )
    phi_s = phi(model, s)
    # snap the nonnegative real root onto the polished phi value
    idx = min(
        range(len(polished)),
        key=lambda k: abs(polished[k] - phi_s),
    )
    ordered = [complex(phi_s)]
    for k, r in enumerate(polished):
        if k == idx:
            continue
        if abs(r.imag) < 1e-9 * scale:
            r = complex(r.real, 0.0)
        ordered.append(r)
    return ordered
