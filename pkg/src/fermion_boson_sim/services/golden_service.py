from typing import Dict, List, Optional, Sequence

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.oracle.fock import GOLDEN_ALPHAS, GOLDEN_NPH, GOLDEN_NPH_CHECK, generate_golden, golden_record
from fermion_boson_sim.schemas.run_models import GoldenRecord
from fermion_boson_sim.services.storage_service import StorageService, get_storage_service

logger = get_logger(__name__)

GOLDEN_FILE = "holstein_golden.json"


class GoldenService:
    """Reads and regenerates the exact-diagonalization reference table"""

    def __init__(self, storage: Optional[StorageService] = None):
        self.storage = storage or get_storage_service(settings.GOLDEN_DATA_PATH)
        self._records: Dict[float, GoldenRecord] = {}

    def generate(
        self,
        alphas: Sequence[float] = GOLDEN_ALPHAS,
        n_ph: int = GOLDEN_NPH,
        n_check: int = GOLDEN_NPH_CHECK,
    ) -> str:
        """Recompute every record and write the table"""
        records = generate_golden(alphas, n_ph, n_check)
        for record in records:
            self._records[record.alpha] = record
        path = self.storage.save_json([r.model_dump() for r in records], GOLDEN_FILE)
        logger.info("Golden table written", path=path, alphas=list(alphas))
        return path

    def load(self) -> List[GoldenRecord]:
        try:
            payload = self.storage.load_json(GOLDEN_FILE)
        except FileNotFoundError:
            return []
        except ValueError as e:
            logger.error("Corrupt golden table", error=str(e))
            raise ConfigurationError(f"corrupt golden table: {e}") from e
        records = [GoldenRecord(**item) for item in payload]
        for record in records:
            self._records.setdefault(record.alpha, record)
        return records

    def record(self, alpha: float) -> GoldenRecord:
        """Stored record for alpha, computed on demand when the table lacks it"""
        if alpha not in self._records:
            self.load()
        if alpha not in self._records:
            logger.info("Golden record missing, computing", alpha=alpha)
            self._records[alpha] = golden_record(alpha)
        return self._records[alpha]
