"""Generalized polynomials: coefficient vectors over a basis system."""

import math
from dataclasses import dataclass

import numpy as np

from .confluent import RootConfiguration, raw_coefficients_from_roots
from .errors import DimensionMismatch, InvalidConfiguration


@dataclass(frozen=True)
class GeneralizedPolynomial:
    """f(x) = sum_j a_j phi_j(x) over a fixed basis system.

    construction_roots and construction_scale are populated by from_roots:
    the stored roots let diagnostics locate the true zeros, and the scale s
    restores the unnormalized coefficient vector as s * coefficients.
    """

    basis: object
    coefficients: np.ndarray
    construction_roots: RootConfiguration | None = None
    construction_scale: float | None = None

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != len(self.basis):
            raise DimensionMismatch(
                "got %d coefficients for a basis of %d functions"
                % (len(coeffs), len(self.basis))
            )
        if not np.any(coeffs):
            raise InvalidConfiguration("coefficients must not all be zero")

    def eval(self, x, p=0):
        """Evaluate the p-th derivative at x by compensated summation."""
        a = self.coefficients
        return math.fsum(
            a[j] * self.basis.eval(j, x, p) for j in range(len(a)) if a[j] != 0.0
        )

    __call__ = eval

    def term_magnitude(self, x, p=0):
        """Sum of |a_j phi_j^(p)(x)|, the roundoff scale of eval(x, p)."""
        a = self.coefficients
        return math.fsum(
            abs(a[j] * self.basis.eval(j, x, p)) for j in range(len(a)) if a[j] != 0.0
        )

    def residual_profile(self, cfg):
        """|f^(q)(x_j)| for each node j and q = 0 .. alpha_j - 1, flattened
        in node-block row order.  An empty configuration gives []."""
        out = []
        for loc, mult in cfg.nodes:
            for q in range(mult):
                out.append(abs(self.eval(loc, q)))
        return out


def from_roots(basis, cfg):
    """Construct the generalized polynomial vanishing to order alpha_j at
    each node of cfg, normalized to unit maximum coefficient magnitude."""
    if not isinstance(cfg, RootConfiguration):
        cfg = RootConfiguration(tuple(cfg))
    raw = raw_coefficients_from_roots(basis, cfg)
    scale = float(np.max(np.abs(raw)))
    return GeneralizedPolynomial(basis, raw / scale, cfg, scale)


def residual_profile(f, cfg):
    """Module-level alias of GeneralizedPolynomial.residual_profile."""
    if not isinstance(cfg, RootConfiguration):
        cfg = RootConfiguration(tuple(cfg))
    return f.residual_profile(cfg)
