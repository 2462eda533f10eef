r"""
Discrete spectrum: zeros of Delta in the upper half-plane and their residue constants.

Counting uses the winding of Delta_a (q < 0) or Delta_b (q > 0) along the real
line; both normalise to 1 at infinity and have no pole in the upper half-plane
for that sign of q. Location bisects rectangles and reads the zeros from the
contour moments

    S_m = (1/2 pi i) \oint k^m Delta'/Delta dk = N z0^m - (m/2 pi i) \oint k^{m-1} Log Delta dk,

where Log Delta is continued along the contour from the corner z0, so no
derivative of Delta is needed on the contour.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import AZero, CountMismatch, NonConvergence, NotSimple, PhaseJump, RealZero
from .scattering import InitialProfile, SpectralTable, evaluate_delta
from .solitons import ReflectionlessData

logger = logging.getLogger("robin_zeros")

MAX_DEPTH = 12
SPLIT_FRACTIONS = (0.4797, 0.5371, 0.4383)


@dataclass(frozen=True)
class DiscreteSpectrum:
    lam: int
    q: float
    xi: Tuple[complex, ...] = ()
    c: Optional[Tuple[complex, ...]] = None
    simple_flags: Tuple[bool, ...] = ()
    a_nonzero_flags: Tuple[bool, ...] = ()
    dropped: Tuple[complex, ...] = ()

    def __post_init__(self):
        if any(complex(z).imag <= 0 for z in self.xi):
            raise ValueError("discrete spectrum must lie in the open upper half-plane")

    @property
    def M(self) -> int:
        return len(self.xi)

    def reflectionless_data(self) -> ReflectionlessData:
        if self.c is None:
            raise ValueError("residue constants have not been computed")
        return ReflectionlessData(xi=self.xi, c=self.c, lam=self.lam)


@dataclass(frozen=True)
class Rectangle:
    lo: complex
    hi: complex

    @property
    def width(self) -> float:
        return self.hi.real - self.lo.real

    @property
    def height(self) -> float:
        return self.hi.imag - self.lo.imag

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.lo.real - margin <= z.real <= self.hi.real + margin
                and self.lo.imag - margin <= z.imag <= self.hi.imag + margin)

    def boundary(self, n: int) -> np.ndarray:
        """Counter-clockwise closed polygon with n points per edge, starting at lo."""
        corners = [self.lo, complex(self.hi.real, self.lo.imag), self.hi, complex(self.lo.real, self.hi.imag)]
        s = np.arange(n) / n
        edges = [a + s * (b - a) for a, b in zip(corners, corners[1:] + corners[:1])]
        return np.concatenate(edges + [np.array([self.lo])])

    def split(self, fraction: float) -> Tuple["Rectangle", "Rectangle"]:
        if self.width >= self.height:
            cut = self.lo.real + fraction * self.width
            return (Rectangle(self.lo, complex(cut, self.hi.imag)),
                    Rectangle(complex(cut, self.lo.imag), self.hi))
        cut = self.lo.imag + fraction * self.height
        return (Rectangle(self.lo, complex(self.hi.real, cut)),
                Rectangle(complex(self.lo.real, cut), self.hi))


def default_region(k_max: float) -> Rectangle:
    return Rectangle(complex(-k_max / 2, 0.0), complex(k_max / 2, k_max / 2))


# ============================================================================
# COUNTING
# ============================================================================

def count_zeros(table: SpectralTable, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Number of zeros of Delta in the upper half-plane from the phase of Delta_a or Delta_b on the grid."""
    delta = table.delta
    if table.flagged.any() or np.any(np.abs(delta) < tol.singular_tol):
        raise RealZero("Delta vanishes on the real grid")

    normalised = table.delta_a if table.q < 0 else table.delta_b
    steps = np.angle(normalised[1:] / normalised[:-1])
    worst = float(np.max(np.abs(steps)))
    if worst >= np.pi / 2:
        raise PhaseJump(f"phase increment {worst:.3f} >= pi/2; refine the k grid")

    head, tail = float(np.angle(normalised[0])), float(np.angle(normalised[-1]))
    if max(abs(head), abs(tail)) >= np.pi / 16:
        raise PhaseJump(f"tail phase {max(abs(head), abs(tail)):.3f} >= pi/16; increase k_max")

    winding = (head + float(np.sum(steps)) - tail) / (2 * np.pi)
    count = int(round(winding))
    if abs(winding - count) > 0.1 or count < 0:
        raise PhaseJump(f"winding {winding:.4f} is not a nonnegative integer")
    logger.info(f"Delta has {count} zero(s) in the upper half-plane (winding {winding:.6f})")
    return count


# ============================================================================
# LOCATION
# ============================================================================

class _ContourTouchesZero(Exception):
    pass


@dataclass(frozen=True)
class _Moments:
    count: int
    s1: complex
    s2: complex


def _contour_moments(profile: InitialProfile, box: Rectangle, tol: Tolerances, n: int = 32, n_max: int = 2048) -> _Moments:
    while True:
        z = box.boundary(n)
        values = evaluate_delta(profile, z[:-1], tol)["delta"]
        if np.any(np.abs(values) < tol.singular_tol):
            raise _ContourTouchesZero()
        values = np.append(values, values[0])
        steps = np.angle(values[1:] / values[:-1])
        if np.max(np.abs(steps)) < np.pi / 4:
            break
        n *= 2
        if n > n_max:
            raise _ContourTouchesZero()

    winding = float(np.sum(steps)) / (2 * np.pi)
    count = int(round(winding))
    log_delta = np.log(np.abs(values)) + 1j * (np.angle(values[0]) + np.concatenate([[0.0], np.cumsum(steps)]))
    dz = np.diff(z)

    def contour_integral(f):
        return np.sum(0.5 * (f[1:] + f[:-1]) * dz)

    z0 = z[0]
    s1 = count * z0 - contour_integral(log_delta) / (2j * np.pi)
    s2 = count * z0 ** 2 - 2.0 * contour_integral(z * log_delta) / (2j * np.pi)
    logger.debug(f"Contour {box.lo}..{box.hi}: {count} zero(s), {n} points per edge")
    return _Moments(count=count, s1=s1, s2=s2)


def _circle(center: complex, radius: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    phases = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return center + radius * phases, phases


def delta_derivative(
    profile: InitialProfile,
    xi: complex,
    radius: float,
    nodes: int = 32,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """Delta'(xi) from the trapezoid rule on a Cauchy circle."""
    points, phases = _circle(xi, radius, nodes)
    values = evaluate_delta(profile, points, tol, converge=True)["delta"]
    return complex(np.mean(values / phases) / radius)


def _derivative_radius(xi: complex, others: Sequence[complex], tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    gaps = [abs(xi - z) for z in others if z != xi]
    return 0.5 * min([xi.imag, tol.cauchy_radius] + gaps)


def _newton(profile: InitialProfile, z: complex, tol: Tolerances, others: Sequence[complex] = ()) -> complex:
    on_axis = profile.lam == 1
    if on_axis:
        z = 1j * abs(z.imag)
    for iteration in range(30):
        radius = _derivative_radius(z, others, tol)
        points, phases = _circle(z, radius, 32)
        values = evaluate_delta(profile, np.concatenate([[z], points]), tol, converge=True)["delta"]
        value = values[0]
        derivative = np.mean(values[1:] / phases) / radius
        step = value / derivative
        if on_axis:
            step = 1j * step.imag
        z_new = z - step
        if z_new.imag <= 0:
            z_new = complex(z_new.real, 0.5 * z.imag)
        z = z_new
        if abs(value) <= tol.loc_tol * abs(derivative):
            logger.debug(f"Newton converged to {z} in {iteration + 1} iterations")
            return z
    raise NonConvergence(f"Newton polishing stalled near {z}")


def _roots_from_power_sums(s1: complex, s2: complex) -> Tuple[complex, complex]:
    root = np.sqrt(2 * s2 - s1 * s1)
    return 0.5 * (s1 + root), 0.5 * (s1 - root)


def _locate_in(profile: InitialProfile, box: Rectangle, tol: Tolerances, depth: int) -> List[complex]:
    moments = _contour_moments(profile, box, tol)
    if moments.count == 0:
        return []
    if moments.count == 1:
        return [_newton(profile, moments.s1, tol)]

    margin = 0.05 * max(box.width, box.height)
    if moments.count == 2:
        r1, r2 = _roots_from_power_sums(moments.s1, moments.s2)
        if abs(r1 - r2) < tol.zero_sep:
            raise NotSimple(f"two zeros within {abs(r1 - r2):.2e} of {0.5 * (r1 + r2)}")
        try:
            polished = [_newton(profile, r1, tol, [r2]), _newton(profile, r2, tol, [r1])]
        except NonConvergence:
            polished = []
        if (len(polished) == 2 and abs(polished[0] - polished[1]) >= tol.zero_sep
                and all(box.contains(z, margin) for z in polished)):
            return polished

    if depth >= MAX_DEPTH or max(box.width, box.height) < tol.zero_sep:
        raise NotSimple(f"{moments.count} zeros inside a box of size {max(box.width, box.height):.2e}")
    for fraction in SPLIT_FRACTIONS:
        try:
            found = []
            for half in box.split(fraction):
                found.extend(_locate_in(profile, half, tol, depth + 1))
            return found
        except _ContourTouchesZero:
            logger.debug(f"Split at {fraction} runs through a zero, retrying")
    raise CountMismatch(f"could not isolate the zeros inside {box.lo}..{box.hi}")


def locate_zeros(
    profile: InitialProfile,
    count: int,
    region: Optional[Rectangle] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    k_max: float = 8.0,
) -> DiscreteSpectrum:
    """
    Locate the zeros of Delta in a rectangle of the upper half-plane.

    Args:
        profile: Initial datum
        count: Expected number of zeros (from count_zeros)
        region: Search rectangle; defaults to |Re k| <= k_max/2, 0 <= Im k <= k_max/2

    Returns:
        DiscreteSpectrum without residue constants, ordered by decreasing Im xi.
    """
    region = region or default_region(k_max)
    try:
        zeros = _locate_in(profile, region, tol, 0)
    except _ContourTouchesZero as e:
        raise CountMismatch(f"a zero of Delta lies on the boundary of {region}") from e

    zeros = sorted(zeros, key=lambda z: -z.imag)
    if len(zeros) != count:
        raise CountMismatch(f"located {len(zeros)} zeros, expected {count}")
    for i in range(len(zeros)):
        for j in range(i):
            if abs(zeros[i] - zeros[j]) < tol.zero_sep:
                raise NotSimple(f"zeros {zeros[j]} and {zeros[i]} closer than zero_sep")
    if profile.lam == 1 and any(abs(z.real) > tol.loc_tol for z in zeros):
        logger.warning("defocusing zeros off the imaginary axis")
    if profile.lam == 1 and len(zeros) != (1 if profile.q > 0 else 0):
        logger.warning(f"defocusing data with q = {profile.q:g} should have {1 if profile.q > 0 else 0} zeros")
    logger.info(f"Located zeros: {', '.join(f'{z:.10g}' for z in zeros) or 'none'}")
    return DiscreteSpectrum(
        lam=profile.lam,
        q=profile.q,
        xi=tuple(zeros),
        simple_flags=tuple(True for _ in zeros),
        a_nonzero_flags=tuple(True for _ in zeros),
    )


# ============================================================================
# RESIDUES
# ============================================================================

def residue_constants(
    profile: InitialProfile,
    spectrum: DiscreteSpectrum,
    tol: Tolerances = DEFAULT_TOLERANCES,
    strict: bool = False,
    radius_scale: float = 1.0,
) -> DiscreteSpectrum:
    """
    c_j = -lam conj(b(-conj xi_j)) (2 xi_j + iq) / (a(xi_j) Delta'(xi_j)).

    A zero shared by a and Delta carries no pole; it is dropped (and listed in
    `dropped`) unless strict=True, which raises AZero instead.
    """
    kept, constants, dropped = [], [], list(spectrum.dropped)
    for xi in spectrum.xi:
        radius = radius_scale * _derivative_radius(xi, spectrum.xi, tol)
        points, phases = _circle(xi, radius, 32)
        values = evaluate_delta(profile, np.concatenate([[xi], points]), tol, converge=True)
        a_xi = values["a"][0]
        b_mirror = values["b_mirror"][0]
        derivative = np.mean(values["delta"][1:] / phases) / radius

        # a(xi) is only as accurate as the located xi
        if abs(a_xi) <= max(tol.singular_tol, 100 * tol.loc_tol):
            if strict:
                raise AZero(f"a vanishes together with Delta at {xi}")
            logger.warning(f"a({xi:.8g}) = 0: no pole there, dropping it from the discrete spectrum")
            dropped.append(xi)
            continue
        c = complex(-profile.lam * np.conj(b_mirror) * (2 * xi + 1j * profile.q) / (a_xi * derivative))
        if abs(c) <= tol.singular_tol:
            logger.warning(f"residue constant vanishes at {xi:.8g}, dropping it")
            dropped.append(xi)
            continue
        kept.append(xi)
        constants.append(c)

    return replace(
        spectrum,
        xi=tuple(kept),
        c=tuple(constants),
        simple_flags=tuple(True for _ in kept),
        a_nonzero_flags=tuple(True for _ in kept),
        dropped=tuple(dropped),
    )


def discrete_spectrum(
    profile: InitialProfile,
    table: SpectralTable,
    tol: Tolerances = DEFAULT_TOLERANCES,
    strict: bool = False,
) -> DiscreteSpectrum:
    """Count, locate and attach residue constants in one call."""
    count = count_zeros(table, tol)
    spectrum = locate_zeros(profile, count, tol=tol, k_max=table.k_max)
    return residue_constants(profile, spectrum, tol, strict=strict)


def scan_delta_minima(
    profile: InitialProfile,
    region: Rectangle,
    n: int = 41,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[complex]:
    """Interior local minima of |Delta| on an n x n grid over the region."""
    re = np.linspace(region.lo.real, region.hi.real, n)
    im = np.linspace(region.lo.imag, region.hi.imag, n)
    grid = re[None, :] + 1j * im[:, None]
    magnitude = np.abs(evaluate_delta(profile, grid.ravel(), tol)["delta"]).reshape(grid.shape)

    minima = []
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            window = magnitude[i - 1:i + 2, j - 1:j + 2]
            if magnitude[i, j] == window.min() and np.sum(window == window.min()) == 1:
                minima.append(complex(grid[i, j]))
    return minima
