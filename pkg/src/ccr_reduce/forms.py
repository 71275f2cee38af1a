"""Sesquilinear form, symplectic form, scalar product, and Weyl words.

The central object is B(f1, f2) = integral d^3k conj(a1) a2 over momentum
space; the symplectic form is Omega = -2 Im B and the vacuum scalar product
is mu = Re B.  For pairs whose terms are Gaussians decorated only by
rotations and translations, B reduces to an exact 3D Gaussian integral;
boosted terms are integrated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MassMismatchError, NegativeFormError
from .modes import FieldVector, GaussianPacket, add, scale
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    adaptive_spherical,
    adaptive_tensor3,
    bounding_radius,
    box_intersection,
)

_CLOSED_FORM_EPS = 5e-15


@dataclass(frozen=True)
class FormValue:
    """A computed bilinear-form value with its numerical error estimate."""

    value: complex
    error_estimate: float

    def to_json(self) -> dict:
        v = complex(self.value)
        return {"value": [v.real, v.imag], "error_estimate": float(self.error_estimate)}


@dataclass(frozen=True)
class WeylWord:
    """Formal Weyl-algebra element: a unit-modulus phase times W(vector)."""

    phase: complex
    vector: FieldVector

    def __post_init__(self):
        if abs(abs(complex(self.phase)) - 1.0) > 1e-9:
            raise ValueError("Weyl word phase must have unit modulus")

    def to_json(self) -> dict:
        from .modes import field_to_json

        p = complex(self.phase)
        return {"phase": [p.real, p.imag], "vector": field_to_json(self.vector)}


def _affine_of_term(term):
    """Fold a term into (coeff, M, b, phi) with a(k) = c exp(-(k-b)M(k-b)/2 + i phi.k).

    Returns None when the chain contains a boost, whose frequency factor is
    not Gaussian-affine.
    """
    if isinstance(term, GaussianPacket):
        return term.coeff, np.diag(1.0 / term.width**2), term.center.copy(), np.zeros(3)
    base = term.base
    M = np.diag(1.0 / base.width**2)
    b = base.center.copy()
    phi = np.zeros(3)
    for g in reversed(term.chain):  # innermost action first
        parts = g.affine_parts()
        if parts is None:
            return None
        lam, theta = parts
        M = lam @ M @ lam.T
        b = lam @ b
        phi = lam @ phi + theta
    return base.coeff, M, b, phi


def _closed_pair(a1, a2) -> complex:
    """Exact int d^3k conj(term1) term2 for two affine Gaussian terms."""
    c1, M1, b1, phi1 = a1
    c2, M2, b2, phi2 = a2
    M = M1 + M2
    v = M1 @ b1 + M2 @ b2 + 1j * (phi2 - phi1)
    expo = 0.5 * v @ np.linalg.solve(M, v) - 0.5 * (b1 @ M1 @ b1 + b2 @ M2 @ b2)
    return (np.conj(c1) * c2 * (2.0 * np.pi) ** 1.5
            / np.sqrt(np.linalg.det(M)) * np.exp(expo))


def _numeric_bform(f1: FieldVector, f2: FieldVector, quad: QuadratureConfig) -> FormValue:
    boxes1 = f1.term_boxes()
    boxes2 = f2.term_boxes()
    pieces = [box_intersection(b1, b2) for b1 in boxes1 for b2 in boxes2]
    pieces = [p for p in pieces if p is not None]
    if not pieces:
        return FormValue(0.0 + 0.0j, 1e-15)
    lo = np.min([p[0] for p in pieces], axis=0)
    hi = np.max([p[1] for p in pieces], axis=0)

    def integrand(K):
        return np.conj(f1.amplitude(K)) * f2.amplitude(K)

    wmin = max(min(f1.min_width(), f2.min_width()), 1e-3)
    if f1.mass == 0.0 and (f1.has_boost or f2.has_boost):
        # the boost frequency ratio is bounded but direction-dependent at the
        # origin; in spherical coordinates it is smooth, so integrate the
        # whole bounding ball on the (r, cos theta, phi) grid
        r_max = bounding_radius((lo, hi))
        nr = int(np.clip(3.0 * r_max / wmin, 48, 240))
        val, err = adaptive_spherical(integrand, r_max, quad,
                                      base_counts=(nr, 48, 96),
                                      max_counts=(300, 220, 440))
    else:
        extent = hi - lo
        base = [int(np.clip(3.0 * extent[i] / wmin, 24, 160)) for i in range(3)]
        val, err = adaptive_tensor3(integrand, (lo, hi), quad, base_counts=base)
    return FormValue(val, err)


def bform(f1: FieldVector, f2: FieldVector,
          quad: QuadratureConfig = DEFAULT_CONFIG) -> FormValue:
    """B(f1, f2) = integral of conj(a1) a2 over momentum space.

    Closed form whenever both fields are free of boosts; otherwise adaptive
    quadrature with an error estimate.
    """
    if f1.mass != f2.mass:
        raise MassMismatchError(f"form of fields with masses {f1.mass} and {f2.mass}")
    if f1.is_zero or f2.is_zero:
        return FormValue(0.0 + 0.0j, 0.0)
    aff1 = [_affine_of_term(t) for t in f1.terms]
    aff2 = [_affine_of_term(t) for t in f2.terms]
    if all(a is not None for a in aff1) and all(a is not None for a in aff2):
        total = 0.0 + 0.0j
        for a1 in aff1:
            for a2 in aff2:
                total += _closed_pair(a1, a2)
        return FormValue(total, _CLOSED_FORM_EPS * (abs(total) + 1.0))
    return _numeric_bform(f1, f2, quad)


def omega(f1: FieldVector, f2: FieldVector,
          quad: QuadratureConfig = DEFAULT_CONFIG) -> FormValue:
    """Symplectic form Omega = -2 Im B.  Antisymmetric; Omega(f, f) = 0."""
    b = bform(f1, f2, quad)
    return FormValue(-2.0 * complex(b.value).imag, 2.0 * b.error_estimate)


def mu(f1: FieldVector, f2: FieldVector,
       quad: QuadratureConfig = DEFAULT_CONFIG) -> FormValue:
    """Vacuum scalar product mu = Re B."""
    b = bform(f1, f2, quad)
    return FormValue(complex(b.value).real, b.error_estimate)


def qf_bound_check(f1: FieldVector, f2: FieldVector,
                   quad: QuadratureConfig = DEFAULT_CONFIG):
    """Evaluate both sides of (1/2)|Omega(f1,f2)| <= sqrt(mu11 * mu22).

    Returns (lhs, rhs, holds) with holds = lhs <= rhs * (1 + rel_tol) + abs_tol.
    """
    lhs = 0.5 * abs(omega(f1, f2, quad).value)
    m11 = mu(f1, f1, quad).value
    m22 = mu(f2, f2, quad).value
    rhs = float(np.sqrt(max(m11, 0.0) * max(m22, 0.0)))
    holds = lhs <= rhs * (1.0 + quad.rel_tol) + quad.abs_tol
    return lhs, rhs, holds


def apply_A(f: FieldVector) -> FieldVector:
    """The complex structure: multiply the amplitude by i.

    Satisfies (1/2) Omega(f1, f2) = mu(f1, A f2), A^2 = -1, and skew
    adjointness with respect to mu.
    """
    return scale(f, 1j)


def state_value(mu_diagonal: float) -> float:
    """Quasi-free state on a Weyl generator: exp(-mu(f, f) / 2).

    Rejects negative diagonals beyond roundoff, since that signals a mu that
    is not a scalar product on its argument.
    """
    x = float(mu_diagonal)
    if x < -1e-12:
        raise NegativeFormError(f"mu diagonal must be nonnegative, got {x}")
    return float(np.exp(-0.5 * max(x, 0.0)))


def weyl_multiply(w1: WeylWord, w2: WeylWord,
                  quad: QuadratureConfig = DEFAULT_CONFIG) -> WeylWord:
    """Product rule: phases multiply with the cocycle exp(i Omega(v1,v2)/2)."""
    om = omega(w1.vector, w2.vector, quad).value
    phase = w1.phase * w2.phase * np.exp(0.5j * om)
    return WeylWord(phase, add(w1.vector, w2.vector))


def weyl_star(w: WeylWord) -> WeylWord:
    """Adjoint: W(f)* = W(-f) with conjugated phase."""
    return WeylWord(np.conj(w.phase), scale(w.vector, -1.0))


def weyl_identity(mass: float) -> WeylWord:
    return WeylWord(1.0 + 0.0j, FieldVector(mass, ()))


def commutator_check(f1: FieldVector, g, f2: FieldVector,
                     quad: QuadratureConfig = DEFAULT_CONFIG):
    """Matrix element of [A, Phi_g] between f1 and f2, via two routes.

    Returns (mu(f1, Phi_g A f2), mu(f1, A Phi_g f2)); the second is computed
    as half the symplectic form, so the two sides go through independent
    evaluations and their difference measures the commutator.
    """
    from .groups import apply_group  # deferred to avoid an import cycle

    lhs = mu(f1, apply_group(g, apply_A(f2)), quad).value
    rhs = 0.5 * omega(f1, apply_group(g, f2), quad).value
    return lhs, rhs
