"""Output tree layout and atomic artifact writing."""

import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)


def atomic_write_bytes(path: Union[str, Path], data: bytes) -> Path:
    """Write ``data`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Atomic UTF-8 text write with ``\\n`` line endings."""
    return atomic_write_bytes(path, text.encode("utf-8"))


def format_value(value: Any) -> str:
    """Render a CSV cell; floats use 17 significant digits so they round-trip."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays to plain JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def clean_slug(name: str) -> str:
    """Lower-case, filesystem-safe version of ``name``."""
    clean = name.lower()
    clean = "".join(c if c.isalnum() or c in " -_" else "" for c in clean)
    clean = "_".join(clean.replace("-", " ").split())
    return clean[:80]


class ArtifactWriter:
    """Writes run artifacts under ``<base>/<experiment>/<case_id>/``."""

    def __init__(self, base_directory: Union[str, Path]):
        """Initialize the writer.

        Args:
            base_directory: Root of the output tree.
        """
        self.base_directory = Path(base_directory)
        self.base_directory.mkdir(parents=True, exist_ok=True)

    def experiment_directory(self, experiment: str) -> Path:
        """Directory for one experiment's summary and scaling tables."""
        directory = self.base_directory / clean_slug(experiment)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def case_directory(self, experiment: str, case_id: str) -> Path:
        """Directory for one geometry case of an experiment."""
        directory = self.experiment_directory(experiment) / clean_slug(case_id)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def write_csv(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Write a CSV table atomically."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
        atomic_write_text(path, buffer.getvalue())
        logger.info(f"Wrote {path}")
        return path

    def write_json(self, path: Path, data: Any) -> Path:
        """Write sorted, indented JSON atomically."""
        text = json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False)
        atomic_write_text(path, text + "\n")
        logger.info(f"Wrote {path}")
        return path

    def write_text(self, path: Path, text: str) -> Path:
        """Write any text artifact (SVG) atomically."""
        atomic_write_text(path, text)
        logger.info(f"Wrote {path}")
        return path

    def list_artifacts(self, experiment: str) -> List[Path]:
        """All files written for ``experiment``, sorted."""
        directory = self.base_directory / clean_slug(experiment)
        if not directory.exists():
            return []
        return sorted(p for p in directory.rglob("*") if p.is_file())
