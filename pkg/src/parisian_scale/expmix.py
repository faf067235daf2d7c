"""Exact exponential-polynomial mixtures.

An :class:`ExpMix` represents ``f(x) = sum_j w_j x^{k_j} e^{rho_j x}`` with
complex weights/rates (in conjugate pairs, so the value is real on the real
axis) and small integer powers.  The class is closed under differentiation,
definite antidifferentiation from 0, multiplication by x and by e^{a x}, which
is everything the scale-function calculus needs; no gridding anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# rates closer than this are treated as confluent (the x * e^{rho x} limit);
# model roots are kept at least 1e-8 apart upstream, so this never conflates
# genuinely distinct terms
_IMAG_TOL = 1e-9
_MERGE_TOL = 1e-10


@dataclass(frozen=True)
class ExpMix:
    """Finite mixture ``sum w * x^k * exp(rho * x)``.

    ``terms`` is a tuple of ``(w, rho, k)`` with complex ``w``, ``rho`` and
    integer ``k >= 0``.  A constant offset is a ``(w, 0, 0)`` term.
    """

    terms: tuple[tuple[complex, complex, int], ...]

    @classmethod
    def build(cls, terms) -> "ExpMix":
        """Normalize: merge terms with equal (rho, k), drop zero weights."""
        acc: dict[tuple[complex, int], complex] = {}
        for w, rho, k in terms:
            w = complex(w)
            rho = complex(rho)
            k = int(k)
            key = None
            for (r0, k0) in acc:
                if k0 == k and abs(r0 - rho) <= _MERGE_TOL * (1.0 + abs(rho)):
                    key = (r0, k0)
                    break
            if key is None:
                key = (rho, k)
                acc[key] = 0.0 + 0.0j
            acc[key] += w
        out = tuple(
            (w, rho, k) for (rho, k), w in acc.items() if abs(w) > 0.0
        )
        return cls(out)

    @classmethod
    def constant(cls, value: float) -> "ExpMix":
        return cls.build([(value, 0.0, 0)])

    def value_complex(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for w, rho, k in self.terms:
            out += w * x**k * np.exp(rho * x)
        return out

    def __call__(self, x):
        """Evaluate at real x (scalar or array); imaginary parts must cancel."""
        val = self.value_complex(x)
        scale = 1.0 + np.abs(val)
        if np.any(np.abs(val.imag) > _IMAG_TOL * scale):
            raise ArithmeticError("conjugate pairing violated: imaginary residue")
        real = val.real
        return float(real) if real.ndim == 0 else real

    def derivative(self) -> "ExpMix":
        """d/dx, exact."""
        new = []
        for w, rho, k in self.terms:
            new.append((w * rho, rho, k))
            if k >= 1:
                new.append((w * k, rho, k - 1))
        return ExpMix.build(new)

    def antiderivative(self) -> "ExpMix":
        """F with F' = self and F(0) = 0, exact."""
        new = []
        for w, rho, k in self.terms:
            new.extend(_antider_term(w, rho, k))
        return ExpMix.build(new)

    def integral(self, x) -> float:
        """Definite integral over [0, x]."""
        return self.antiderivative()(x)

    def shift_rate(self, a: complex) -> "ExpMix":
        """Multiply by e^{a x}."""
        return ExpMix.build([(w, rho + a, k) for w, rho, k in self.terms])

    def mul_x(self) -> "ExpMix":
        """Multiply by x."""
        return ExpMix.build([(w, rho, k + 1) for w, rho, k in self.terms])

    def scaled(self, factor: complex) -> "ExpMix":
        return ExpMix.build([(w * factor, rho, k) for w, rho, k in self.terms])

    def __add__(self, other: "ExpMix") -> "ExpMix":
        return ExpMix.build(self.terms + other.terms)

    def __sub__(self, other: "ExpMix") -> "ExpMix":
        return self + other.scaled(-1.0)

    def dickson_hipp(self, theta: complex, x) -> float:
        """Truncated Laplace transform ``int_0^x e^{-theta y} f(y) dy``.

        The confluent case theta ~ rho_j is exact (the term integrates to a
        polynomial), not a numerical limit.
        """
        return self.shift_rate(-theta).integral(x)


def _antider_term(w: complex, rho: complex, k: int):
    """Terms of the antiderivative (vanishing at 0) of w x^k e^{rho x}."""
    if abs(rho) <= _MERGE_TOL:
        return [(w / (k + 1), 0.0, k + 1)]
    # integration by parts: int x^k e^{rho x} = x^k e^{rho x}/rho - (k/rho) int x^{k-1} e^{rho x}
    out = [(w / rho, rho, k)]
    const = 0.0 + 0.0j
    coeff = w / rho
    for j in range(k, 0, -1):
        coeff = -coeff * j / rho
        out.append((coeff, rho, j - 1))
    # subtract value at 0 (only the k=0 exponential term is nonzero at 0)
    if k == 0:
        const = -w / rho
    else:
        const = -coeff
    out.append((const, 0.0, 0))
    return out
