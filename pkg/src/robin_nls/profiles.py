"""Built-in initial profiles evaluated on a uniform half-line grid."""

import logging
from typing import Any, Dict, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ValidationFailure
from .scattering import InitialProfile
from .solitons import SolitonParams, soliton_profile

logger = logging.getLogger("robin_profiles")


def _grid(h: float, length: float) -> np.ndarray:
    if not h > 0 or not length > 0:
        raise ValidationFailure("grid spacing and length must be positive")
    n = max(2, int(np.ceil(length / h - 1e-9)))
    return np.arange(n + 1) * h


def _soliton_length(params: SolitonParams, tol: Tolerances) -> float:
    s = params.sqrt_omega
    if params.lam == -1:
        amplitude = 2.0 * s
        shift = params.phi
    else:
        q = params.q_s
        amplitude = 2.0 * params.alpha * s * (q + s) / (params.alpha ** 2 + 2.0 * s * (q + s))
        shift = 0.0
    return max(1.0, (np.log(2.0 * amplitude / tol.tail_tol) - shift) / s)


def soliton(params: SolitonParams, h: float, L: Optional[float] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    """Stationary soliton sampled on [0, L]; L defaults to where |u_s0| drops below tail_tol/2."""
    if L is None:
        L = _soliton_length(params, tol)
    x = _grid(h, L)
    logger.debug(f"Soliton profile on {x.size} nodes, L = {x[-1]:.4g}")
    return InitialProfile(samples=soliton_profile(params, x), h=h, lam=params.lam, q=params.q_s)


def defocusing_soliton(omega: float, alpha: float, h: float, L: Optional[float] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    return soliton(SolitonParams(lam=1, omega=omega, alpha=alpha), h, L, tol)


def focusing_soliton(omega: float, phi: float, h: float, L: Optional[float] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    if phi == 0:
        raise ValidationFailure("phi = 0 gives q = 0, which is not a Robin problem")
    return soliton(SolitonParams(lam=-1, omega=omega, phi=phi), h, L, tol)


def gaussian(
    amplitude: float,
    lam: int,
    q: float,
    h: float,
    L: float = 12.0,
    width: float = 1.0,
    center: float = 0.0,
) -> InitialProfile:
    """u0(x) = amplitude * exp(-((x - center)/width)^2) restricted to x >= 0."""
    x = _grid(h, L)
    return InitialProfile(samples=amplitude * np.exp(-(((x - center) / width) ** 2)), h=h, lam=lam, q=q)


def scaled(profile: InitialProfile, factor: float) -> InitialProfile:
    """factor * u0 with the same lambda and q."""
    return InitialProfile(samples=factor * profile.samples, h=profile.h, lam=profile.lam, q=profile.q)


GENERATORS = {
    "defocusing_soliton": defocusing_soliton,
    "focusing_soliton": focusing_soliton,
    "gaussian": gaussian,
}


def from_generator(name: str, params: Dict[str, Any], tol: Tolerances = DEFAULT_TOLERANCES) -> InitialProfile:
    """
    Build a profile from a named generator.

    Args:
        name: One of GENERATORS
        params: Generator keyword arguments; `lambda` is accepted for `lam` and
            `scale` multiplies the result.
    """
    if name not in GENERATORS:
        raise ValidationFailure(f"unknown generator '{name}' (expected one of {sorted(GENERATORS)})")
    params = dict(params)
    if "lambda" in params:
        params["lam"] = params.pop("lambda")
    factor = params.pop("scale", None)
    params.setdefault("h", 2.0 ** -7)
    if name != "gaussian":
        params.setdefault("tol", tol)
    try:
        profile = GENERATORS[name](**params)
    except (TypeError, ValueError) as e:
        raise ValidationFailure(f"bad parameters for generator '{name}': {e}") from e
    return scaled(profile, factor) if factor is not None else profile
