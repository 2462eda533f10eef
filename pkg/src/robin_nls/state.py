import logging
import time
import uuid
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ValidationFailure
from .scattering import InitialProfile, SpectralTable, build_table
from .zeros import DiscreteSpectrum, discrete_spectrum

logger = logging.getLogger("robin_state")


@dataclass
class ProfileEntry:
    profile: InitialProfile
    source: str
    created_at: float
    table: Optional[SpectralTable] = None
    spectrum: Optional[DiscreteSpectrum] = None


class ResultStore:
    def __init__(self, tolerances: Tolerances = DEFAULT_TOLERANCES, threads: int = 1):
        # Maps profile_id (given to the client) -> profile and its cached results
        self.entries: Dict[str, ProfileEntry] = {}
        self.tolerances = tolerances
        self.threads = threads

    def add_profile(self, profile: InitialProfile, source: str) -> str:
        profile_id = uuid.uuid4().hex[:8]
        self.entries[profile_id] = ProfileEntry(profile=profile, source=source, created_at=time.time())
        logger.info(f"Stored profile {profile_id} ({source}, N = {profile.N})")
        return profile_id

    def get(self, profile_id: str) -> ProfileEntry:
        entry = self.entries.get(profile_id)
        if entry is None:
            raise ValidationFailure(f"unknown profile id '{profile_id}'. Use load_profile first.")
        return entry

    def ensure_table(self, profile_id: str, k_max: float = 8.0, n_k: int = 513) -> SpectralTable:
        """Spectral table for a stored profile, rebuilt when a different grid is requested"""
        entry = self.get(profile_id)
        table = entry.table
        if table is None or table.k_grid.size != n_k or not np.isclose(table.k_max, k_max):
            logger.info(f"Building spectral table for {profile_id}...")
            entry.table = build_table(entry.profile, np.linspace(-k_max, k_max, n_k), self.tolerances, self.threads)
            entry.spectrum = None
        return entry.table

    def ensure_spectrum(self, profile_id: str) -> DiscreteSpectrum:
        entry = self.get(profile_id)
        if entry.spectrum is None:
            table = entry.table or self.ensure_table(profile_id)
            entry.spectrum = discrete_spectrum(entry.profile, table, self.tolerances)
            logger.info(f"Located {entry.spectrum.M} zeros for {profile_id}")
        return entry.spectrum

    def list_profiles(self) -> List[dict]:
        return [
            {
                "id": profile_id,
                "source": entry.source,
                "lambda": entry.profile.lam,
                "q": entry.profile.q,
                "N": entry.profile.N,
                "h": entry.profile.h,
                "has_table": entry.table is not None,
                "has_spectrum": entry.spectrum is not None,
            }
            for profile_id, entry in self.entries.items()
        ]

    def clear(self):
        self.entries.clear()


store = ResultStore()
