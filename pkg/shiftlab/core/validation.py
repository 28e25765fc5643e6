from typing import Iterable, List

from .types import PreferenceTriple, ValidationReport, Violation


def validate_dataset(records: Iterable[PreferenceTriple], vocab_size: int) -> ValidationReport:
    """
    Check every record against the PreferenceTriple invariants.

    Never raises on bad data; all failures are carried by the report.

    Args:
        records: Preference records to check
        vocab_size: Vocabulary size V; valid ids lie in [0, V)

    Returns:
        ValidationReport with the record count and one Violation per failure
    """
    violations: List[Violation] = []
    seen_ids = set()
    count = 0
    for record in records:
        count += 1
        if record.id in seen_ids:
            violations.append(Violation(record_id=record.id, kind="duplicate_id"))
        seen_ids.add(record.id)

        if record.chosen.length == 0:
            violations.append(Violation(record_id=record.id, kind="empty_chosen"))
        if record.rejected.length == 0:
            violations.append(Violation(record_id=record.id, kind="empty_rejected"))

        for field in ("prompt", "chosen", "rejected"):
            bad = [t for t in getattr(record, field) if t < 0 or t >= vocab_size]
            if bad:
                violations.append(
                    Violation(
                        record_id=record.id,
                        kind="out_of_vocabulary",
                        detail=f"{field}: {bad[:5]}",
                    )
                )

    return ValidationReport(record_count=count, vocab_size=vocab_size, violations=tuple(violations))
