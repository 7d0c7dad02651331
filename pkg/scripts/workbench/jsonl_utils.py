"""
JSONL utilities for the analysis run log.

Appends are serialized with an exclusive file lock so parallel CLI runs
writing into the same output directory do not interleave lines.
"""

import fcntl
import json
import logging
from pathlib import Path
from typing import Callable, List, Optional

logger = logging.getLogger(__name__)


class JSONLReader:
    """Read and filter JSONL logs with error handling."""

    @staticmethod
    def read_log(path: Path, filter_fn: Optional[Callable[[dict], bool]] = None) -> List[dict]:
        """
        Read JSONL with optional filtering.

        Args:
            path: Path to JSONL file
            filter_fn: Optional filter function (entry) -> bool

        Returns:
            List of dict entries
        """
        path = Path(path)
        if not path.exists():
            return []

        entries = []
        with open(path, 'r', encoding='utf-8') as f:
            for line_num, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError as e:
                    logger.warning("Malformed JSON at %s:%d: %s", path, line_num, e)
                    continue
                if filter_fn and not filter_fn(entry):
                    continue
                entries.append(entry)

        return entries


class JSONLWriter:
    """Process-safe JSONL writer with file locking."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, data: dict):
        """
        Atomically append entry to JSONL file.

        Args:
            data: Dictionary to append as JSON line
        """
        with open(self.path, 'a', encoding='utf-8') as f:
            try:
                fcntl.flock(f.fileno(), fcntl.LOCK_EX)
                f.write(json.dumps(data, ensure_ascii=False, default=str, sort_keys=True) + '\n')
                f.flush()
            finally:
                fcntl.flock(f.fileno(), fcntl.LOCK_UN)
