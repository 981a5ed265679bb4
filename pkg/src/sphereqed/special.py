"""Spherical Bessel/Hankel functions of complex argument and Legendre polynomials.

Everything here is recurrence based and table free.  j_l is generated by
downward (Miller) recurrence, which is stable because j is the minimal
solution as l grows; h_l^(1) is generated upward, where it is the dominant
solution.  Riccati derivatives [z f_l(z)]' are obtained from the standard
derivative recurrence so Mie coefficients never need explicit f_l'.
"""

from __future__ import annotations

import numpy as np

# Highest multipole order the public interface accepts.  Enough for size
# parameters up to ~kR = 66 of the microsphere geometry plus evanescent tail.
L_MAX_SUPPORTED = 300

_RESCALE = 1e250


def _check_order(l: int) -> None:
    if l < 0 or l > L_MAX_SUPPORTED:
        raise ValueError(f"multipole order l={l} outside supported range 0..{L_MAX_SUPPORTED}")


def sph_jn_all(lmax: int, z: complex) -> np.ndarray:
    """j_l(z) for l = 0..lmax, complex z, by downward recurrence.

    The raw downward pass is normalized against whichever of j_0, j_1 has
    the larger magnitude; the two have no common zeros, so the scale is
    always well conditioned (normalizing at j_0 alone fails near sin z = 0).
    """
    z = complex(z)
    if z == 0:
        out = np.zeros(lmax + 1, dtype=complex)
        out[0] = 1.0
        return out
    # start far enough above max(l, |z|) that seed contamination by the
    # dominant solution decays below ~1e-12 by the time we reach lmax
    nstart = max(lmax, int(abs(z))) + 60 + int(2.0 * abs(z) ** 0.5)
    raw = np.zeros(nstart + 1, dtype=complex)
    jp = 0.0 + 0.0j
    j = 1e-30 + 0.0j
    raw[nstart] = j
    for n in range(nstart, 0, -1):
        jm = (2 * n + 1) / z * j - jp
        jp = j
        j = jm
        raw[n - 1] = j
        if abs(j.real) > _RESCALE or abs(j.imag) > _RESCALE:
            raw[n - 1:] /= _RESCALE
            j /= _RESCALE
            jp /= _RESCALE
    j0 = np.sin(z) / z
    j1 = np.sin(z) / z**2 - np.cos(z) / z
    if abs(j0) >= abs(j1):
        raw *= j0 / raw[0]
    else:
        raw *= j1 / raw[1]
    out = raw[: lmax + 1]
    if not np.all(np.isfinite(out.view(float))):
        raise OverflowError(f"spherical j recurrence overflowed for lmax={lmax}, z={z}")
    return out


def sph_h1n_all(lmax: int, z: complex) -> np.ndarray:
    """h_l^(1)(z) for l = 0..lmax by upward recurrence from the closed forms
    h_0 = -i e^{iz}/z and h_1 = -e^{iz}(z + i)/z^2."""
    z = complex(z)
    if z == 0:
        raise ValueError("h_l^(1) diverges at z = 0")
    out = np.zeros(lmax + 1, dtype=complex)
    eiz = np.exp(1j * z)
    out[0] = -1j * eiz / z
    if lmax >= 1:
        out[1] = -eiz * (z + 1j) / z**2
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, lmax):
            out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    if not np.all(np.isfinite(out.view(float))):
        raise OverflowError(f"spherical h recurrence overflowed for lmax={lmax}, z={z}")
    return out


def sph_yn_all(lmax: int, z: complex) -> np.ndarray:
    """y_l(z) for l = 0..lmax by upward recurrence (dominant direction)."""
    z = complex(z)
    if z == 0:
        raise ValueError("y_l diverges at z = 0")
    out = np.zeros(lmax + 1, dtype=complex)
    out[0] = -np.cos(z) / z
    if lmax >= 1:
        out[1] = -np.cos(z) / z**2 - np.sin(z) / z
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, lmax):
            out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    if not np.all(np.isfinite(out.view(float))):
        raise OverflowError(f"spherical y recurrence overflowed for lmax={lmax}, z={z}")
    return out


def riccati_deriv_all(farr: np.ndarray, z: complex) -> np.ndarray:
    """[z f_l(z)]' for every order of a spherical-Bessel-family array.

    Uses f_l' = f_{l-1} - (l+1) f_l / z, so [z f_l]' = z f_{l-1} - l f_l
    for l >= 1 and [z f_0]' = f_0 - z f_1.
    """
    z = complex(z)
    lmax = len(farr) - 1
    out = np.empty_like(farr)
    if lmax == 0:
        raise ValueError("need at least orders 0..1 to form the derivative")
    out[0] = farr[0] - z * farr[1]
    ls = np.arange(1, lmax + 1)
    out[1:] = z * farr[:-1] - ls * farr[1:]
    return out


def legendre_all(lmax: int, x: float) -> np.ndarray:
    """P_l(x) for l = 0..lmax by the three-term recurrence; requires |x| <= 1."""
    if abs(x) > 1.0:
        raise ValueError(f"Legendre argument x={x} outside [-1, 1]")
    out = np.zeros(lmax + 1)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = x
    for l in range(1, lmax):
        out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1)
    return out


# scalar interface

def spherical_j(l: int, z: complex) -> complex:
    """Spherical Bessel function j_l of complex argument."""
    _check_order(l)
    return complex(sph_jn_all(l, z)[l])


def spherical_h1(l: int, z: complex) -> complex:
    """Spherical Hankel function h_l^(1) of complex argument."""
    _check_order(l)
    return complex(sph_h1n_all(l, z)[l])


def spherical_y(l: int, z: complex) -> complex:
    """Spherical Bessel function y_l of complex argument."""
    _check_order(l)
    return complex(sph_yn_all(l, z)[l])


def riccati_deriv(kind: str, l: int, z: complex) -> complex:
    """[z f_l(z)]' where f is j_l (kind 'J') or h_l^(1) (kind 'H1')."""
    _check_order(l)
    if kind == "J":
        farr = sph_jn_all(max(l, 1), z)
    elif kind == "H1":
        farr = sph_h1n_all(max(l, 1), z)
    else:
        raise ValueError(f"unknown Riccati kind {kind!r}, expected 'J' or 'H1'")
    return complex(riccati_deriv_all(farr, z)[l])


def legendre_p(l: int, x: float) -> float:
    """Legendre polynomial P_l(x), |x| <= 1."""
    _check_order(l)
    return float(legendre_all(l, x)[l])
