import os
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

THREADS_ENV = "DEGENHEAT_THREADS"
FLOAT_FORMAT = "%.17g"


class Utility:
    """
    Helper functions shared by the diagnostics and the command line runner:
    CSV output at full double precision, the sweep thread cap and plain-text
    summary tables.
    """

    @staticmethod
    def get_utils_list() -> List[str]:
        """
        Get a list of all available utility methods.
        """
        return [
            "write_csv",
            "read_csv",
            "resolve_thread_count",
            "format_table",
        ]

    @staticmethod
    def get_utils_description(util_name: str) -> str:
        """
        Get the description of a specific utility method.
        """
        descriptions = {
            "write_csv": "Writes a DataFrame as UTF-8 CSV with LF endings and 17 significant digits.",
            "read_csv": "Reads a CSV written by write_csv back without losing precision.",
            "resolve_thread_count": "Worker count for a sweep, capped by DEGENHEAT_THREADS.",
            "format_table": "Renders rows of a report as an aligned plain-text table.",
        }
        return descriptions.get(util_name, "Utility not found.")

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        """
        Write ``frame`` without its index.

        Parameters
        ----------
        frame : pd.DataFrame
            Table to write.
        path : str or Path
            Destination; missing parent directories are created.

        Returns
        -------
        Path
            The written path.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(
            path,
            index=False,
            float_format=FLOAT_FORMAT,
            lineterminator="\n",
            encoding="utf-8",
        )
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    @staticmethod
    def read_csv(path: Union[str, Path]) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip", encoding="utf-8")

    @staticmethod
    def resolve_thread_count(tasks: int, requested: Optional[int] = None) -> int:
        """
        Number of workers for ``tasks`` independent solves.

        ``requested`` wins over the ``DEGENHEAT_THREADS`` environment variable;
        without either, the CPU count is used. The result never exceeds ``tasks``.

        Raises
        ------
        ConfigurationError
            If ``DEGENHEAT_THREADS`` is set to anything but a positive integer.
        """
        if requested is None:
            raw = os.environ.get(THREADS_ENV)
            if raw is not None and raw.strip():
                try:
                    requested = int(raw)
                except ValueError:
                    raise ConfigurationError(
                        f"{THREADS_ENV} must be a positive integer, got '{raw}'"
                    ) from None
                if requested < 1:
                    raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got '{raw}'")
            else:
                requested = os.cpu_count() or 1
        return max(1, min(int(requested), max(tasks, 1)))

    @staticmethod
    def format_table(rows: Sequence[Dict[str, object]], columns: Sequence[str]) -> str:
        """
        Align ``rows`` under ``columns``; floats use 6 significant digits.
        """

        def cell(value) -> str:
            if isinstance(value, bool):
                return "PASS" if value else "FAIL"
            if isinstance(value, float):
                return f"{value:.6g}"
            return str(value)

        body = [[cell(row.get(column, "")) for column in columns] for row in rows]
        widths = [
            max([len(column)] + [len(line[i]) for line in body]) for i, column in enumerate(columns)
        ]
        lines = ["  ".join(column.ljust(w) for column, w in zip(columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines.extend("  ".join(value.ljust(w) for value, w in zip(line, widths)) for line in body)
        return "\n".join(lines)
