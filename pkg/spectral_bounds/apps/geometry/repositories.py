"""
Geometry app repositories - loading polytopes from spec files.
"""
import json
from abc import ABC, abstractmethod
from pathlib import Path

from loguru import logger

from spectral_bounds.apps.core.exceptions import ConfigError

from .models import Polytope
from .serializers import PolytopeSpecSerializer


class PolytopeRepositoryInterface(ABC):
    """Interface for polytope repository."""

    @abstractmethod
    def load(self, source) -> Polytope:
        pass


class JsonFilePolytopeRepository(PolytopeRepositoryInterface):
    """Reads polytope spec files (JSON) and validates them with PolytopeSpecSerializer."""

    def load(self, source) -> Polytope:
        path = Path(source)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Arquivo de domínio não encontrado: {path}")
        except json.JSONDecodeError as e:
            logger.error(f"Malformed domain file {path}: {e}")
            raise ConfigError(f"Arquivo de domínio malformado ({path}): linha {e.lineno}, coluna {e.colno}: {e.msg}")

        if not isinstance(payload, dict):
            raise ConfigError(f"Arquivo de domínio deve conter um objeto JSON: {path}")
        payload.setdefault("name", path.stem)
        return self.load_payload(payload)

    def load_payload(self, payload: dict) -> Polytope:
        serializer = PolytopeSpecSerializer(data=payload)
        if not serializer.is_valid():
            logger.error(f"Invalid domain spec {payload.get('name')}: {serializer.errors}")
            raise ConfigError(f"Especificação de domínio inválida: {dict(serializer.errors)}")

        polytope = serializer.save()
        logger.info(f"Loaded domain {polytope.domain_id} ({polytope.kind}, n={polytope.dimension})")
        return polytope
