import csv
import io
import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.logging import get_logger

logger = get_logger(__name__)


def render_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str], config: Mapping[str, Any]) -> str:
    """
    Render rows as CSV with a config comment row and a header row

    Args:
        rows: Records keyed by column name
        columns: Column order
        config: Run configuration echoed into the first line

    Returns:
        CSV text with "\\n" line endings
    """
    buffer = io.StringIO()
    buffer.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row.get(column, "")) for column in columns])
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"


def _format(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return value


class StorageService(ABC):
    """Abstract base class for artifact storage"""

    @abstractmethod
    def save_file(self, file_content: Union[str, bytes], file_path: str) -> str:
        """
        Save a file to storage

        Args:
            file_content: Content of the file (string or bytes)
            file_path: Path where the file should be saved

        Returns:
            Path to the saved file
        """

    @abstractmethod
    def get_file(self, file_path: str) -> bytes:
        """
        Get a file from storage

        Args:
            file_path: Path to the file

        Returns:
            File content as bytes
        """

    @abstractmethod
    def delete_file(self, file_path: str) -> bool:
        """
        Delete a file from storage

        Args:
            file_path: Path to the file

        Returns:
            True if a file was removed
        """

    def save_csv(
        self,
        rows: Iterable[Mapping[str, Any]],
        columns: Sequence[str],
        config: Mapping[str, Any],
        file_path: str,
    ) -> str:
        return self.save_file(render_csv(rows, columns, config), file_path)

    def save_json(self, payload: Any, file_path: str) -> str:
        return self.save_file(render_json(payload), file_path)

    def load_json(self, file_path: str) -> Any:
        return json.loads(self.get_file(file_path).decode("utf-8"))


class LocalStorageService(StorageService):
    """Local file system storage"""

    def __init__(self, base_path: Optional[str] = None):
        """
        Initialize local storage

        Args:
            base_path: Directory that relative paths resolve against
        """
        self.base_path = Path(base_path or settings.OUTPUT_PATH)

    def _resolve(self, file_path: str) -> Path:
        return self.base_path / file_path

    def save_file(self, file_content: Union[str, bytes], file_path: str) -> str:
        full_path = self._resolve(file_path)
        full_path.parent.mkdir(parents=True, exist_ok=True)
        try:
            if isinstance(file_content, bytes):
                full_path.write_bytes(file_content)
            else:
                with open(full_path, "w", encoding="utf-8", newline="") as f:
                    f.write(file_content)
        except OSError as e:
            logger.error("Error saving file", error=str(e), file_path=str(full_path))
            raise
        logger.debug("Saved artifact", file_path=str(full_path))
        return str(full_path)

    def get_file(self, file_path: str) -> bytes:
        full_path = self._resolve(file_path)
        if not full_path.exists():
            raise FileNotFoundError(f"File not found: {file_path}")
        return full_path.read_bytes()

    def delete_file(self, file_path: str) -> bool:
        full_path = self._resolve(file_path)
        if not full_path.exists():
            return False
        try:
            full_path.unlink()
            return True
        except OSError as e:
            logger.error("Error deleting file", error=str(e), file_path=file_path)
            return False


def get_storage_service(base_path: Optional[str] = None) -> StorageService:
    """
    Factory for the artifact store

    Args:
        base_path: Override of settings.OUTPUT_PATH

    Returns:
        StorageService instance
    """
    return LocalStorageService(base_path)
