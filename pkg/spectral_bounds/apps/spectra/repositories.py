"""
Spectra app repositories - cache of computed spectra.
"""
import hashlib
from abc import ABC, abstractmethod

import numpy as np
from django.conf import settings
from django.core.cache import cache
from loguru import logger

from spectral_bounds.apps.geometry.models import BOX, Polytope

from .models import Spectrum


class SpectrumRepositoryInterface(ABC):
    """Interface for spectrum repository."""

    @abstractmethod
    def get_spectrum(self, polytope: Polytope, method: str, count: int, **parameters) -> Spectrum | None:
        pass

    @abstractmethod
    def save_spectrum(self, polytope: Polytope, method: str, spectrum: Spectrum, **parameters) -> None:
        pass


class CacheSpectrumRepository(SpectrumRepositoryInterface):
    """Django cache implementation; spectra are keyed by the geometry, the method and its parameters."""

    def __init__(self):
        self.cache_prefix = "spectrum"

    def _fingerprint(self, polytope: Polytope) -> str:
        digest = hashlib.sha256()
        if polytope.kind == BOX:
            digest.update(np.asarray(polytope.lengths, dtype=float).tobytes())
        else:
            digest.update(polytope.vertices.tobytes())
            digest.update(repr(polytope.faces).encode())
        return digest.hexdigest()[:32]

    def _get_cache_key(self, polytope: Polytope, method: str, count: int, **parameters) -> str:
        options = ",".join(f"{key}={parameters[key]}" for key in sorted(parameters))
        return f"{self.cache_prefix}:{self._fingerprint(polytope)}:{method}:{count}:{options}"

    def get_spectrum(self, polytope: Polytope, method: str, count: int, **parameters) -> Spectrum | None:
        try:
            cached = cache.get(self._get_cache_key(polytope, method, count, **parameters))
        except Exception as e:
            logger.error(f"Error getting cached spectrum: {e}")
            return None

        if cached is None:
            logger.debug(f"Cache miss for spectrum of {polytope.domain_id} ({method}, {count})")
            return None

        logger.info(f"Cache hit for spectrum of {polytope.domain_id} ({method}, {count})")
        return Spectrum(
            eigenvalues=np.asarray(cached["eigenvalues"]),
            method=cached["method"],
            domain_id=polytope.domain_id,
            resolution=cached["resolution"],
            ceiling=cached["ceiling"],
        )

    def save_spectrum(self, polytope: Polytope, method: str, spectrum: Spectrum, **parameters) -> None:
        key = self._get_cache_key(polytope, method, len(spectrum), **parameters)
        payload = {
            "eigenvalues": np.array(spectrum.eigenvalues),
            "method": spectrum.method,
            "resolution": spectrum.resolution,
            "ceiling": spectrum.ceiling,
        }
        try:
            cache.set(key, payload, getattr(settings, "SPECTRUM_CACHE_TIMEOUT", 3600))
            logger.debug(f"Cached spectrum of {polytope.domain_id} under {key}")
        except Exception as e:
            logger.error(f"Error caching spectrum: {e}")
