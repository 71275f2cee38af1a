"""Projections to reduced phase spaces and the reduced bilinear forms.

Compact case: fields project to axisymmetric amplitudes A(kappa, k_z) and the
reduced forms are 2D integrals over the half-plane.  Non-compact case: fields
project to rapidly decreasing sequences A_n, the reduced forms are weighted
sums, and the identification with the Gowdy-model forms C and D is the
identity map away from the zero mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad as _squad

from .errors import (
    NonSymplecticError,
    QuadratureError,
    SingularQuadratureError,
    ZeroModeUndefinedError,
)
from .modes import FieldVector
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, gl_nodes
from .specfun import hankel2_0

SQRT_2PI = np.sqrt(2.0 * np.pi)


def ordered_ns(n_max: int):
    """Canonical summation order 0, -1, 1, -2, 2, ... for reproducible sums."""
    out = [0]
    for m in range(1, n_max + 1):
        out.extend((-m, m))
    return out


@dataclass(frozen=True)
class ReducedSequence:
    """Truncated rapidly-decreasing sequence {A_n}, |n| <= n_max.

    zero_mode_defined records whether the underlying field lies in the
    zero-mode-free subspace, in which case the identification with reduced
    wave solutions fixes the zero mode to be absent.
    """

    entries: dict
    zero_mode_defined: bool
    error_estimate: float = 0.0

    @property
    def n_max(self) -> int:
        return max(abs(n) for n in self.entries)

    def ordered_values(self):
        return [self.entries[n] for n in ordered_ns(self.n_max)]

    def rescaled(self, factor: complex) -> "ReducedSequence":
        return ReducedSequence({n: factor * v for n, v in self.entries.items()},
                               self.zero_mode_defined,
                               abs(factor) * self.error_estimate)

    def tail_ratio(self) -> float:
        """Decay ratio |A_nmax| / |A_(nmax-1)|, the rapid-decrease diagnostic."""
        m = self.n_max
        hi = max(abs(self.entries[m]), abs(self.entries[-m]))
        lo = max(abs(self.entries[m - 1]), abs(self.entries[-(m - 1)]), 1e-300)
        return hi / lo


def pair_sum(s1: ReducedSequence, s2: ReducedSequence) -> complex:
    """sum over n of conj(A1_n) A2_n in the canonical order."""
    if set(s1.entries) != set(s2.entries):
        raise ValueError("sequences have incompatible truncations")
    total = 0.0 + 0.0j
    for n in ordered_ns(s1.n_max):
        total = total + np.conj(s1.entries[n]) * s2.entries[n]
    return total


def reduced_forms_bhp(s1: ReducedSequence, s2: ReducedSequence):
    """Reduced symplectic form and scalar product of two sequences.

    omega_hat = i sum (A1* A2 - A1 A2*),  mu_hat = (1/2) sum (A1* A2 + A1 A2*).
    """
    s = pair_sum(s1, s2)
    return -2.0 * s.imag, s.real


# --- axisymmetric (compact) reduction ---------------------------------------

@dataclass(frozen=True)
class AxisymmetricAmplitude:
    """Evaluator for A(kappa, k_z) = sqrt(kappa)/(2 pi) * angular integral of a.

    The angular integral runs over the circle of radius kappa in the
    (k_x, k_y) plane; trapezoid sampling is spectrally accurate there.
    Grid evaluations are cached per quadrature level so form assembly over
    many pairs reuses each field's values.
    """

    source: FieldVector
    n_angle: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def grid_values(self, kap_nodes: np.ndarray, kz_nodes: np.ndarray,
                    key=None) -> np.ndarray:
        if key is not None and key in self._cache:
            return self._cache[key]
        KAP, KZ = np.meshgrid(kap_nodes, kz_nodes, indexing="ij")
        vals = self.value(KAP, KZ)
        if key is not None:
            self._cache[key] = vals
        return vals

    def value(self, kappa, kz):
        kappa = np.asarray(kappa, dtype=float)
        kz = np.asarray(kz, dtype=float)
        kappa_b, kz_b = np.broadcast_arrays(kappa, kz)
        shape = kappa_b.shape
        kap_flat = kappa_b.reshape(-1)
        kz_flat = kz_b.reshape(-1)
        beta = 2.0 * np.pi * np.arange(self.n_angle) / self.n_angle
        cb, sb = np.cos(beta), np.sin(beta)
        out = np.empty(kap_flat.shape, dtype=complex)
        step = max(1, 4_000_000 // max(self.n_angle, 1))
        for i0 in range(0, len(kap_flat), step):
            sl = slice(i0, i0 + step)
            K = np.stack([kap_flat[sl, None] * cb,
                          kap_flat[sl, None] * sb,
                          np.broadcast_to(kz_flat[sl, None], (kap_flat[sl].size, beta.size))],
                         axis=-1)
            out[sl] = np.mean(self.source.amplitude(K), axis=-1)
        out = np.sqrt(kap_flat) * out
        if shape == ():
            return complex(out[0])
        return out.reshape(shape)

    def kappa_max(self) -> float:
        lo, hi = self.source.support_box()
        return float(np.hypot(max(abs(lo[0]), abs(hi[0])), max(abs(lo[1]), abs(hi[1]))))

    def kz_interval(self):
        lo, hi = self.source.support_box()
        return float(lo[2]), float(hi[2])


def project_axisymmetric(f: FieldVector, n_angle: Optional[int] = None) -> AxisymmetricAmplitude:
    """Project onto the rotation-invariant sector.

    The angular node count is chosen from the sharpest angular feature a
    packet can present (width over distance from the axis) unless given.
    """
    if n_angle is None:
        centers = f.term_centers()
        r_c = float(np.max(np.hypot(centers[:, 0], centers[:, 1]))) if len(centers) else 0.0
        wmin = max(f.min_width(), 1e-3)
        # a packet at xy-distance r subtends an angle ~ width / (r + 2 width)
        n_angle = int(np.clip(16.0 * (r_c + 2.0 * f.max_width()) / wmin, 64, 512))
    return AxisymmetricAmplitude(f, int(n_angle))


def axisym_domain(amps: Sequence[AxisymmetricAmplitude]):
    """Common (kappa, k_z) quadrature domain for a family of projections.

    Pinning one domain across a corpus lets the per-field grid caches serve
    every pair of the Gram assembly.
    """
    kmax = max(a.kappa_max() for a in amps)
    zlo = min(a.kz_interval()[0] for a in amps)
    zhi = max(a.kz_interval()[1] for a in amps)
    wmin = max(min(a.source.min_width() for a in amps), 1e-3)
    nk = int(np.clip(3.0 * kmax / wmin, 32, 220))
    nz = int(np.clip(3.0 * (zhi - zlo) / wmin, 32, 220))
    return kmax, zlo, zhi, nk, nz


def reduced_forms_axisym(A1: AxisymmetricAmplitude, A2: AxisymmetricAmplitude,
                         quad: QuadratureConfig = DEFAULT_CONFIG,
                         domain=None):
    """2D quadrature of the reduced bilinear forms on (kappa, k_z).

    Returns (omega_hat, mu_hat); both derive from
    B_hat = 2 pi * int_0^inf dkappa int dk_z conj(A1) A2.
    """
    if domain is None:
        domain = axisym_domain((A1, A2))
    kmax, zlo, zhi, nk, nz = domain

    def level(nk_, nz_):
        kap, wk = gl_nodes(nk_, 0.0, kmax)
        kz, wz = gl_nodes(nz_, zlo, zhi)
        key = (nk_, nz_, round(kmax, 9), round(zlo, 9), round(zhi, 9))
        v1 = A1.grid_values(kap, kz, key)
        v2 = A2.grid_values(kap, kz, key)
        return 2.0 * np.pi * complex(np.sum(wk[:, None] * wz[None, :] * np.conj(v1) * v2))

    prev = level(nk, nz)
    cur = level(int(nk * 1.4) + 4, int(nz * 1.4) + 4)
    if abs(cur - prev) > max(quad.abs_tol, quad.rel_tol * abs(cur)) * 50:
        cur2 = level(int(nk * 2.0) + 8, int(nz * 2.0) + 8)
        if abs(cur2 - cur) > max(quad.abs_tol * 100, quad.rel_tol * abs(cur2) * 100):
            raise QuadratureError("axisymmetric reduced forms did not converge")
        cur = cur2
    return -2.0 * cur.imag, cur.real


# --- non-compact (BHP) reduction ---------------------------------------------

def _slice_callable(f: FieldVector, n: int) -> Callable[[float], complex]:
    def a_slice(k: float) -> complex:
        return complex(f.amplitude(np.array([float(n), float(k), 0.0])))
    return a_slice


def project_bhp(f: FieldVector, n_max: Optional[int] = None,
                quad: QuadratureConfig = DEFAULT_CONFIG) -> ReducedSequence:
    """Sequence A_n = (sqrt(2 pi)/i) * int dk (n^2+k^2)^(-1/4) a(n, k, 0).

    The n = 0 integrand has a |k|^(-1/2) endpoint; with singularity_split the
    substitution k = u|u| removes it exactly, otherwise a plain node-doubling
    rule is attempted and fails on the singularity.
    """
    if f.mass != 0.0:
        raise ValueError("the discrete reduction applies to the massless theory")
    if n_max is None:
        n_max = quad.n_max
    lo, hi = f.support_box()
    k_lo, k_hi = float(lo[1]) - 0.5, float(hi[1]) + 0.5
    entries = {}
    err_total = 0.0
    for n in ordered_ns(n_max):
        a_slice = _slice_callable(f, n)
        if n == 0:
            if quad.singularity_split:
                u_hi = np.sqrt(max(abs(k_lo), abs(k_hi)))
                g = lambda u: 2.0 * a_slice(u * abs(u))
                re, er = _squad(lambda u: g(u).real, -u_hi, u_hi, points=[0.0],
                                epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=300)
                im, ei = _squad(lambda u: g(u).imag, -u_hi, u_hi, points=[0.0],
                                epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=300)
                q_val, q_err = re + 1j * im, er + ei
            else:
                q_val, q_err = _gl_ladder_singular(a_slice, k_lo, k_hi, quad)
        else:
            w = lambda k: (n * n + k * k) ** (-0.25)
            re, er = _squad(lambda k: (a_slice(k) * w(k)).real, k_lo, k_hi,
                            epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=300)
            im, ei = _squad(lambda k: (a_slice(k) * w(k)).imag, k_lo, k_hi,
                            epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=300)
            q_val, q_err = re + 1j * im, er + ei
        entries[n] = SQRT_2PI / 1j * q_val
        err_total += SQRT_2PI * q_err
    return ReducedSequence(entries, f.is_zero_mode_free(), err_total)


def _gl_ladder_singular(a_slice, k_lo, k_hi, quad):
    """Plain doubling rule on the singular n = 0 integrand; raises on stall."""
    prev = None
    for n_nodes in (64, 128, 256, 512, 1024):
        k, w = gl_nodes(n_nodes, k_lo, k_hi)
        vals = np.array([a_slice(kk) for kk in k])
        cur = complex(np.sum(w * vals * np.abs(k) ** -0.5))
        if prev is not None and abs(cur - prev) <= max(quad.abs_tol, quad.rel_tol * abs(cur)):
            return cur, abs(cur - prev)
        prev = cur
    raise SingularQuadratureError(
        "n = 0 projection integrand is singular; enable singularity_split")


# --- null-space / rank analysis ----------------------------------------------

def null_space_analysis(fields: Sequence[FieldVector], group: str,
                        quad: QuadratureConfig = DEFAULT_CONFIG,
                        haar_scale: float = 1.0,
                        rank_tol: float = 1e-8,
                        inclusion_tol: float = 1e-6) -> dict:
    """Gram-matrix rank analysis of the averaged forms on a span of fields.

    Builds the Gram matrices of mu_G and Omega_G, ranks mu_G by eigenvalue
    threshold rank_tol relative to the largest eigenvalue, and verifies that
    every numerical null direction of mu_G is annihilated by Omega_G.  A
    direction that is only numerically null (eigenvalue lambda_j below the
    threshold but nonzero) cannot be more Omega-null than the quasi-free
    bound allows, so each residual is tested against
    max(inclusion_tol, 4 sqrt(lambda_j / lambda_max)); a genuine inclusion
    failure would show an Omega residual of order one instead.
    """
    m = len(fields)
    if m == 0 or m > 40:
        raise ValueError("null_space_analysis expects between 1 and 40 fields")
    B = np.zeros((m, m), dtype=complex)
    if group == "circle":
        from .averaging import average_bform_circle  # deferred import, cycle

        for i in range(m):
            for j in range(i, m):
                B[i, j] = average_bform_circle(fields[i], fields[j], quad).value * haar_scale
                if j > i:
                    B[j, i] = np.conj(B[i, j])
    elif group == "bhp":
        seqs = [project_bhp(f, quad.n_max, quad) for f in fields]
        for i in range(m):
            for j in range(m):
                B[i, j] = haar_scale * pair_sum(seqs[i], seqs[j])
    else:
        raise ValueError(f"unknown group {group!r}")

    gram_mu = 0.5 * (B.real + B.real.T)
    gram_om = -2.0 * 0.5 * (B.imag - B.imag.T)
    evals, evecs = np.linalg.eigh(gram_mu)
    lam_max = float(np.max(np.abs(evals))) if m else 0.0
    thresh = rank_tol * lam_max
    keep = evals > thresh
    rank = int(np.sum(keep))
    null_evals = evals[~keep]
    null_vecs = evecs[:, ~keep]
    scale = lam_max + 1e-300
    om_on_null = [float(np.max(np.abs(gram_om @ null_vecs[:, j]))) / scale
                  for j in range(null_vecs.shape[1])]
    inclusion = all(
        r <= max(inclusion_tol, 4.0 * np.sqrt(max(lam, 0.0) / scale))
        for r, lam in zip(om_on_null, null_evals))
    dropped = np.sort(np.abs(evals[~keep]))[::-1]
    kept = np.sort(evals[keep])
    if rank == 0 or rank == m:
        gap_ratio = float("inf")
    else:
        gap_ratio = float(kept[0] / max(dropped[0], 1e-300))
    return {
        "gram_mu_eigvals": [float(v) for v in evals],
        "gram_omega_on_null": om_on_null,
        "inclusion_holds": bool(inclusion),
        "gap_ratio": gap_ratio,
        "rank": rank,
        "threshold": float(thresh),
        "ill_conditioned": bool(np.isfinite(gap_ratio) and gap_ratio < 10.0),
    }


# --- Gowdy identification ----------------------------------------------------

@dataclass(frozen=True)
class GowdySolution:
    """Solution of the reduced wave equation on R+ x S1 by its mode constants.

    coeffs holds a_n for n != 0; zero_mode holds a_0, or None when the
    identification of the zero-frequency sector has not been fixed.
    """

    coeffs: dict
    zero_mode: Optional[complex] = 0j

    @property
    def n_max(self) -> int:
        return max(abs(n) for n in self.coeffs) if self.coeffs else 0

    def a0(self) -> complex:
        if self.zero_mode is None:
            raise ZeroModeUndefinedError(
                "zero mode requested but no canonical choice was made")
        return complex(self.zero_mode)


def gowdy_from_sequence(s: ReducedSequence,
                        zero_mode_choice: Optional[complex] = None) -> GowdySolution:
    """Identify a reduced sequence with a Gowdy solution via a_n = A_n.

    On the zero-mode-free subspace the zero mode is canonically absent
    (a_0 = 0); elsewhere the identification is ambiguous and an explicit
    choice must be supplied, otherwise the zero mode is left undefined.
    """
    coeffs = {n: v for n, v in s.entries.items() if n != 0}
    if zero_mode_choice is not None:
        zm = complex(zero_mode_choice)
    elif s.zero_mode_defined:
        zm = s.entries.get(0, 0j)
    else:
        zm = None
    return GowdySolution(coeffs, zm)


def gowdy_forms(p1: GowdySolution, p2: GowdySolution):
    """The model's symplectic form C and vacuum scalar product D.

    Same finite sums as the reduced forms of sequences, in the same
    summation order, so the identification is arithmetically exact.
    """
    if set(p1.coeffs) != set(p2.coeffs):
        raise ValueError("solutions have incompatible truncations")
    n_max = p1.n_max
    total = np.conj(p1.a0()) * p2.a0()
    for n in ordered_ns(n_max):
        if n == 0:
            continue
        total = total + np.conj(p1.coeffs[n]) * p2.coeffs[n]
    return -2.0 * total.imag, total.real


def gowdy_value(p: GowdySolution, tau: float, sigma: float) -> float:
    """Evaluate the solution at (tau, sigma), tau > 0."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    a0 = p.a0()
    val = (1.0 / np.sqrt(np.pi)) * (a0 * (1.0 - 1j * np.log(tau))).real
    osc = 0j
    for n in ordered_ns(p.n_max):
        if n == 0:
            continue
        osc = osc + p.coeffs[n] * hankel2_0(abs(n) * tau) * np.exp(1j * n * sigma)
    return float(val + (1.0 / np.sqrt(2.0)) * osc.real)


def zero_mode_symplectic_map(matrix) -> np.ndarray:
    """Validate a 2x2 real matrix acting on (Re a_0, Im a_0) as symplectic."""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (2, 2):
        raise NonSymplecticError("zero-mode map must be a 2x2 real matrix")
    det = float(np.linalg.det(m))
    if abs(det - 1.0) > 1e-12:
        raise NonSymplecticError(f"zero-mode map must have determinant 1, got {det}")
    return m


def transform_zero_mode(p: GowdySolution, matrix) -> GowdySolution:
    """Apply a symplectic change of the zero-mode coordinates.

    The symplectic form C on zero-mode pairs is invariant; the scalar
    product D pulls back through the map.
    """
    m = zero_mode_symplectic_map(matrix)
    a0 = p.a0()
    x, y = m @ np.array([a0.real, a0.imag])
    return GowdySolution(dict(p.coeffs), complex(x, y))
