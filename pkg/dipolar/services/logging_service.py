"""
Centralized logging setup and run records.
"""

import csv
import json
import logging
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dipolar.config import Config

logger = logging.getLogger(__name__)

MAX_METADATA_ENTRIES = 1000
RUN_FIELDS = ["timestamp", "run_id", "command", "evaluator", "total", "status", "error"]


def setup_logging(level: Union[int, str] = logging.INFO, log_dir: Optional[Path] = None):
    """Configure the root logger with a file handler and a stream handler."""
    log_dir = Path(log_dir) if log_dir is not None else Config.LOG_DIR
    log_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(module)s - %(message)s",
        handlers=[
            logging.FileHandler(log_dir / "dipolar.log"),
            logging.StreamHandler(),
        ],
        force=True,
    )


class RunLogger:
    """Append-only records of command runs and their effective configurations."""

    def __init__(self, log_dir: Optional[Path] = None):
        """
        Initialize run logger.

        Args:
            log_dir: Directory for run records (defaults to Config.LOG_DIR)
        """
        self.log_dir = Path(log_dir) if log_dir is not None else Config.LOG_DIR
        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.run_log_file = self.log_dir / "runs.csv"
        self.metadata_log_file = self.log_dir / "run_metadata.json"

        self._init_run_log()

    def _init_run_log(self):
        if not self.run_log_file.exists():
            with open(self.run_log_file, "w", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(RUN_FIELDS)

    @staticmethod
    def new_run_id() -> str:
        return uuid.uuid4().hex[:12]

    def log_run(self, run_id: str, command: str, evaluator: Optional[str] = None,
                total: Optional[float] = None, status: str = "ok", error: Optional[str] = None):
        """
        Append one run record.

        Args:
            run_id: Run identifier
            command: CLI command name
            evaluator: Evaluator tag, if any
            total: Headline energy of the run, if any
            status: "ok" or "error"
            error: Error message if any
        """
        try:
            with open(self.run_log_file, "a", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow([
                    datetime.now().isoformat(), run_id, command, evaluator or "",
                    "" if total is None else repr(float(total)), status, error or "",
                ])
            logger.debug(f"Run {run_id} recorded ({command}, {status})")
        except OSError as e:
            logger.error(f"Failed to record run {run_id}: {e}")

    def log_metadata(self, run_id: str, metadata: Dict[str, Any]):
        """Store the effective configuration of a run, keeping the last 1000 entries."""
        try:
            entries: List[Dict[str, Any]] = []
            if self.metadata_log_file.exists():
                try:
                    with open(self.metadata_log_file, "r", encoding="utf-8") as f:
                        entries = json.load(f)
                except json.JSONDecodeError:
                    logger.warning("Corrupted run metadata log, starting fresh")
                    entries = []

            entries.append({"timestamp": datetime.now().isoformat(), "run_id": run_id,
                            "metadata": metadata})
            entries = entries[-MAX_METADATA_ENTRIES:]

            with open(self.metadata_log_file, "w", encoding="utf-8") as f:
                json.dump(entries, f, indent=2, ensure_ascii=False)
        except OSError as e:
            logger.error(f"Failed to record metadata of run {run_id}: {e}")

    def get_recent_runs(self, limit: int = 100) -> List[Dict[str, Any]]:
        """Most recent run records, oldest first."""
        if not self.run_log_file.exists():
            return []
        try:
            with open(self.run_log_file, "r", encoding="utf-8") as f:
                runs = list(csv.DictReader(f))
        except OSError as e:
            logger.error(f"Failed to read run log: {e}")
            return []
        return runs[-limit:]

    def get_run_stats(self) -> Dict[str, Any]:
        """Run counts per command and the share of successful runs."""
        runs = self.get_recent_runs(limit=10000)
        stats: Dict[str, Any] = {"total_runs": len(runs), "commands": {}, "success_rate": 0.0}
        for run in runs:
            command = run.get("command", "unknown")
            stats["commands"][command] = stats["commands"].get(command, 0) + 1
        if runs:
            ok = sum(1 for run in runs if run.get("status") == "ok")
            stats["success_rate"] = ok / len(runs) * 100
        return stats

    def get_metadata_entries(self) -> List[Dict[str, Any]]:
        if not self.metadata_log_file.exists():
            return []
        try:
            with open(self.metadata_log_file, "r", encoding="utf-8") as f:
                return [entry.get("metadata", {}) for entry in json.load(f)]
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Failed to read run metadata: {e}")
            return []
