"""Microsphere physics: permittivity, TM Mie coefficients, collective decay rates,
and field-resonance extraction.

Unit conventions (used throughout the package):
    frequencies in units of the transverse resonance frequency omega_T,
    lengths in units of lambda_T = 2 pi c / omega_T,
    decay rates in units of the free-space single-atom rate Gamma_0.
With these choices the size parameter of a length L at frequency omega is
simply 2 pi * omega * L, and hbar, c, epsilon_0 and the dipole moment drop
out of every formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import (
    L_MAX_SUPPORTED,
    legendre_all,
    riccati_deriv_all,
    sph_h1n_all,
    sph_jn_all,
)

# adaptive series truncation: stop after this many consecutive negligible terms
_TAIL_RUN = 5
_TAIL_RTOL = 1e-12


class NonConvergenceError(RuntimeError):
    """Raised when the multipole series or a root refinement fails to settle."""


class PoleError(ArithmeticError):
    """Raised when a Mie coefficient is evaluated essentially on a resonance pole."""


@dataclass(frozen=True)
class DrudeLorentzParams:
    """Single-oscillator dielectric model; omega_p and gamma in omega_T units."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if self.omega_p < 0:
            raise ValueError("omega_p must be >= 0")
        if self.gamma <= 0:
            raise ValueError("absorption parameter gamma must be > 0")

    @property
    def omega_l(self) -> float:
        """Upper band-gap edge sqrt(1 + omega_p^2)."""
        return math.sqrt(1.0 + self.omega_p**2)


@dataclass(frozen=True)
class SphereSystem:
    """Sphere of given radius with two radially polarized atoms at equal height.

    radius and atom_distance (surface-to-atom) are in lambda_T units; theta is
    the angle between the two radial dipole directions, theta = pi for
    diametrically opposite atoms.
    """

    params: DrudeLorentzParams
    radius: float
    atom_distance: float
    theta: float = math.pi

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("sphere radius must be > 0")
        if self.atom_distance <= 0:
            raise ValueError("atoms must sit strictly outside the sphere (atom_distance > 0)")
        if not 0.0 <= self.theta <= math.pi + 1e-12:
            raise ValueError("theta must lie in [0, pi]")

    @property
    def r(self) -> float:
        """Radial atom position R + Delta r in lambda_T units."""
        return self.radius + self.atom_distance


def resonance_kind(omega_c: float, params: DrudeLorentzParams) -> str:
    """SG for mid-frequencies inside the band gap (1, omega_L), WG otherwise."""
    return "SG" if 1.0 < omega_c < params.omega_l else "WG"


@dataclass(frozen=True)
class Resonance:
    """A sphere-assisted field resonance: complex root omega_c - i*delta_omega_c
    of the TM reflection-coefficient denominator at multipole order l."""

    omega_c: float
    delta_omega_c: float
    l: int
    kind: str = "WG"

    def __post_init__(self):
        if self.omega_c <= 0 or self.delta_omega_c <= 0:
            raise ValueError("resonance needs omega_c > 0 and delta_omega_c > 0")
        if self.kind not in ("SG", "WG"):
            raise ValueError("kind must be 'SG' or 'WG'")


def permittivity(p: DrudeLorentzParams, omega: complex) -> complex:
    """Drude-Lorentz permittivity eps(omega) = 1 + omega_p^2/(1 - omega^2 - i omega gamma)."""
    return 1.0 + p.omega_p**2 / (1.0 - omega * omega - 1j * omega * p.gamma)


def refractive_index(p: DrudeLorentzParams, omega: complex) -> complex:
    """Principal sqrt of the permittivity with Im >= 0 (decaying field inside
    the absorbing medium)."""
    n = np.sqrt(complex(permittivity(p, omega)))
    if n.imag < 0:
        n = -n
    return n


def size_parameter(omega: complex, length: float) -> complex:
    """k * length = 2 pi * omega * length in the normalized units."""
    return 2.0 * math.pi * omega * length


def _mie_arrays(sys: SphereSystem, lmax: int, omega: complex):
    """Numerator/denominator arrays of the TM scattering coefficient for
    l = 0..lmax at frequency omega (complex allowed)."""
    eps = permittivity(sys.params, omega)
    n2 = refractive_index(sys.params, omega)
    z1 = size_parameter(omega, sys.radius)
    z2 = n2 * z1
    j1 = sph_jn_all(lmax, z1)
    h1 = sph_h1n_all(lmax, z1)
    j2 = sph_jn_all(lmax, z2)
    rj1 = riccati_deriv_all(j1, z1)
    rj2 = riccati_deriv_all(j2, z2)
    rh1 = riccati_deriv_all(h1, z1)
    num = eps * j2 * rj1 - j1 * rj2
    den = eps * j2 * rh1 - h1 * rj2
    return num, den


def mie_coefficient(sys: SphereSystem, l: int, omega: complex) -> complex:
    """TM scattering coefficient B_l^N(omega); accepts complex omega so the
    same expression can be driven to its complex poles."""
    if l < 1:
        raise ValueError("Mie coefficient defined for l >= 1")
    if l > L_MAX_SUPPORTED:
        raise ValueError(f"l={l} exceeds supported maximum {L_MAX_SUPPORTED}")
    if omega == 0:
        raise ValueError("omega must be nonzero")
    num, den = _mie_arrays(sys, l, omega)
    if abs(den[l]) < 1e-300:
        raise PoleError(f"Mie denominator vanishes at l={l}, omega={omega}")
    return complex(-num[l] / den[l])


def _rate_terms(sys: SphereSystem, omega: float, theta_eff: float, lmax: int):
    """Per-order contributions to Gamma/Gamma_0 for l = 1..lmax, plus the two
    Legendre-free envelopes used by the truncation logic.

    env_re = weight * |Re h(j + Bh)| bounds each term (|P_l| <= 1) but beats
    through zero as the scattered phase rotates; env_mag = weight *
    (j^2 + |B h| |h|) is monotone in the tail and supplies a clean geometric
    decay rate.  |B h^2| is assembled as |B h| * |h| to stay clear of h^2
    overflow.
    """
    kr = 2.0 * math.pi * omega * sys.r
    jr = sph_jn_all(lmax, kr)
    hr = sph_h1n_all(lmax, kr)
    num, den = _mie_arrays(sys, lmax, omega)
    bl = np.zeros(lmax + 1, dtype=complex)
    mask = np.abs(den) > 0
    bl[mask] = -num[mask] / den[mask]
    pl = legendre_all(lmax, math.cos(theta_eff))
    ls = np.arange(lmax + 1, dtype=float)
    weight = 1.5 * ls * (ls + 1.0) * (2.0 * ls + 1.0) / kr**2
    scattered = bl * hr
    core = (hr * (jr + scattered)).real
    terms = weight * core * pl
    if not np.all(np.isfinite(terms)):
        raise NonConvergenceError(
            f"multipole term overflow at omega={omega} (resonant order beyond float64 range)"
        )
    env_re = weight * np.abs(core)
    env_mag = weight * (np.abs(jr) ** 2 + np.abs(scattered) * np.abs(hr))
    return terms[1:], env_re[1:], env_mag[1:]


def collective_rate(sys: SphereSystem, omega: float, same_atom: bool = False) -> float:
    """Collective decay rate Gamma_{A'A''}/Gamma_0 for radial dipoles.

    same_atom selects the single-atom rate (theta_eff = 0); otherwise the
    cross rate at the system's dipole angle.  The multipole sum stops once
    five consecutive term envelopes fall below 1e-12 of the running total.
    Close to the surface the scattered part only decays geometrically as
    (R/r)^{2l}; if the l = 300 cap is reached first, the remaining tail is
    bounded geometrically and accepted when below 1e-5 of the total (with a
    1 Gamma_0 floor).  Beyond that the geometry needs orders that overflow
    float64 and an error is raised.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    theta_eff = 0.0 if same_atom else sys.theta
    scale = max(
        2.0 * math.pi * omega * sys.r,
        abs(refractive_index(sys.params, omega)) * 2.0 * math.pi * omega * sys.radius,
    )
    lmax = min(L_MAX_SUPPORTED, int(scale) + 60)
    while True:
        terms, env_re, env_mag = _rate_terms(sys, omega, theta_eff, lmax)
        total = 0.0
        run = 0
        for t, e in zip(terms, env_re):
            total += t
            if e < _TAIL_RTOL * (abs(total) + 1.0):
                run += 1
                if run >= _TAIL_RUN:
                    return float(total)
            else:
                run = 0
        if lmax >= L_MAX_SUPPORTED:
            total = float(np.sum(terms))
            # decay rate from the monotone magnitude envelope; amplitude from
            # the recent |Re| maxima (the dissipative fraction of the
            # evanescent response only shrinks with l, so this anchors a
            # conservative geometric tail)
            width = 12
            m1 = float(np.max(env_mag[-2 * width : -width]))
            m2 = float(np.max(env_mag[-width:]))
            amp = float(np.max(env_re[-2 * width :]))
            if m1 > 0 and m2 < m1:
                q = (m2 / m1) ** (1.0 / width)  # per-order geometric factor
                bound = amp * q / (1.0 - q)
                # 1e-5 Gamma_0 absolute floor, far below any resolvable
                # feature of the near-surface sweeps this cap serves
                if bound < 1e-5 * max(abs(total), 1.0):
                    return total
            raise NonConvergenceError(
                f"multipole series did not settle by l={L_MAX_SUPPORTED} at "
                f"omega={omega} (atoms too close to the surface)"
            )
        lmax = min(L_MAX_SUPPORTED, 2 * lmax)


def rates_pm(sys: SphereSystem, omega: float) -> tuple[float, float]:
    """(Gamma_+, Gamma_-) = Gamma_AA +/- Gamma_AB in Gamma_0 units."""
    gaa = collective_rate(sys, omega, same_atom=True)
    gab = collective_rate(sys, omega, same_atom=False)
    return gaa + gab, gaa - gab


def single_term_rate(sys: SphereSystem, res: Resonance, same_atom: bool = False) -> float:
    """The l = res.l term of the multipole sum alone, evaluated at omega_c.

    Near a sharp resonance this term carries essentially the whole rate; far
    from resonance it carries no approximation guarantee.
    """
    theta_eff = 0.0 if same_atom else sys.theta
    terms, _, _ = _rate_terms(sys, res.omega_c, theta_eff, res.l)
    return float(terms[res.l - 1])


def _denominator(sys: SphereSystem, l: int, omega: complex) -> complex:
    return complex(_mie_arrays(sys, l, omega)[1][l])


def _denominator_balance(sys: SphereSystem, l: int, omega: float) -> float:
    """|t1 - t2| / (|t1| + |t2|) for the two denominator terms.

    The raw denominator rides an exponential envelope in omega (through
    j_l(z2) inside the gap); the normalized cancellation ratio is O(1) away
    from a resonance and dips sharply at one, which makes it the right
    quantity to bracket on a real-frequency grid.
    """
    eps = permittivity(sys.params, omega)
    n2 = refractive_index(sys.params, omega)
    z1 = size_parameter(omega, sys.radius)
    z2 = n2 * z1
    j2 = sph_jn_all(l, z2)
    h1 = sph_h1n_all(l, z1)
    rj2 = riccati_deriv_all(j2, z2)
    rh1 = riccati_deriv_all(h1, z1)
    t1 = eps * j2[l] * rh1[l]
    t2 = h1[l] * rj2[l]
    denom = abs(t1) + abs(t2)
    if denom == 0.0:
        return 1.0
    return abs(t1 - t2) / denom


def _newton_root(sys: SphereSystem, l: int, omega0: float) -> complex | None:
    """Complex Newton iteration on the Mie denominator from a real start."""
    om = complex(omega0)
    for _ in range(50):
        h = 1e-7 * abs(om)
        d0 = _denominator(sys, l, om)
        dp = _denominator(sys, l, om + h)
        dm = _denominator(sys, l, om - h)
        deriv = (dp - dm) / (2.0 * h)
        if deriv == 0:
            return None
        step = d0 / deriv
        om -= step
        if abs(step) < 1e-12:
            return om
    return None


def _refine_real_minimum(sys: SphereSystem, l: int, a: float, b: float) -> float:
    """Golden-section minimization of the balance ratio on [a, b]."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1 = _denominator_balance(sys, l, x1)
    f2 = _denominator_balance(sys, l, x2)
    for _ in range(60):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = _denominator_balance(sys, l, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = _denominator_balance(sys, l, x2)
        if b - a < 1e-12 * max(1.0, abs(a)):
            break
    return 0.5 * (a + b)


def find_resonances(
    sys: SphereSystem,
    omega_lo: float,
    omega_hi: float,
    l_range,
    grid_per_unit: int = 2000,
) -> list[Resonance]:
    """Locate field resonances omega_c - i*delta_omega_c in a frequency window.

    For each multipole order the balance ratio is sampled on a real grid
    (grid_per_unit points per unit omega_T, at least 64 across the window),
    interior local minima are sharpened by golden-section search and then
    handed to a complex Newton iteration on the raw denominator.  Converged
    roots are kept when they fall inside the window, have positive width and
    suppress the denominator by at least 1e-8 relative to its off-resonance
    value at omega_c + 3*delta_omega_c.
    """
    if not (0 < omega_lo < omega_hi):
        raise ValueError("need 0 < omega_lo < omega_hi")
    found: list[Resonance] = []
    npts = max(64, int(grid_per_unit * (omega_hi - omega_lo))) + 1
    grid = np.linspace(omega_lo, omega_hi, npts)
    for l in l_range:
        if l < 1 or l > L_MAX_SUPPORTED:
            raise ValueError(f"l={l} outside 1..{L_MAX_SUPPORTED}")
        vals = np.array([_denominator_balance(sys, l, om) for om in grid])
        minima = [
            i
            for i in range(1, npts - 1)
            if vals[i] < vals[i - 1] and vals[i] < vals[i + 1] and vals[i] < 0.5
        ]
        roots: list[complex] = []
        for i in minima:
            om_min = _refine_real_minimum(sys, l, grid[i - 1], grid[i + 1])
            root = _newton_root(sys, l, om_min)
            if root is None:
                continue
            wc, dwc = root.real, -root.imag
            if not (omega_lo <= wc <= omega_hi) or dwc <= 0:
                continue
            ref = abs(_denominator(sys, l, wc + 3.0 * dwc))
            if abs(_denominator(sys, l, root)) >= 1e-8 * ref:
                continue
            if any(abs(root - r) < 10.0 * max(dwc, 1e-12) for r in roots):
                continue
            roots.append(root)
            found.append(
                Resonance(
                    omega_c=wc,
                    delta_omega_c=dwc,
                    l=l,
                    kind=resonance_kind(wc, sys.params),
                )
            )
    found.sort(key=lambda r: (r.omega_c, r.l))
    return found
