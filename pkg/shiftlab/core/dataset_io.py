"""
JSON-lines persistence for preference corpora.

One record per line: {"id": int, "prompt": [int...], "chosen": [int...], "rejected": [int...]}.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Union

from pydantic import ValidationError

from .errors import DataIOError
from .types import PreferenceTriple

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_dataset(path: PathLike, records: Iterable[PreferenceTriple]) -> int:
    """Write records as JSON lines; identical inputs produce identical bytes."""
    path = Path(path)
    lines = [record.model_dump_json() for record in records]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    except OSError as e:
        raise DataIOError(path, f"cannot write dataset: {e}") from e
    logger.debug(f"Wrote {len(lines)} records to {path}")
    return len(lines)


def read_dataset(path: PathLike) -> List[PreferenceTriple]:
    path = Path(path)
    if not path.is_file():
        raise DataIOError(path, "dataset file not found")
    records: List[PreferenceTriple] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(PreferenceTriple.model_validate_json(line))
            except ValidationError as e:
                raise DataIOError(path, f"line {line_no} is not a preference record: {e}") from e
    logger.debug(f"Read {len(records)} records from {path}")
    return records
