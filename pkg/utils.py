# utils.py - Utility functions for cylinder-verify
import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler

from config import KERNEL_NAMES, LOG_FILE, LOG_LEVEL, SUITE_NAMES

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None, log_file: Optional[Path] = None) -> None:
    """Set up root logging with a file handler and a rich console handler."""
    log_file = Path(log_file or LOG_FILE)
    handlers: List[logging.Handler] = [RichHandler(console=Console(stderr=True), show_path=False, markup=False)]
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.insert(0, logging.FileHandler(log_file))
    except OSError as e:
        logger.warning(f"Cannot open log file {log_file}: {e}")
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def validate_suite_names(names: Sequence[str]) -> bool:
    """Check that every requested suite is registered."""
    if not names:
        raise ValueError("At least one suite name is required")
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown:
        raise ValueError(
            f"Unknown suite(s): {', '.join(unknown)}. "
            f"Available suites: {', '.join(SUITE_NAMES)}"
        )
    return True


def validate_kernel_name(name: str) -> bool:
    if name not in KERNEL_NAMES:
        raise ValueError(
            f"Unknown kernel '{name}'. Available kernels: {', '.join(KERNEL_NAMES)}"
        )
    return True


def sanitize_path(path: str) -> Path:
    """Sanitize user-provided path input."""
    path = str(path).replace('\0', '')
    return Path(path).expanduser().resolve()


def atomic_write_text(path: Path, text: str) -> Path:
    """Write text to a temp file in the target directory, then rename over path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    logger.debug(f"Wrote {path}")
    return path


def write_json_atomic(path: Path, payload: Any) -> Path:
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_csv_atomic(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buffer.getvalue())
