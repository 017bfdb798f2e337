"""Load CSV corpora into records, merge duplicates, and write stage files.

CSV is the universal interchange format here: every pipeline stage can be
materialized back to a CSV that carries the same columns as the input plus
an ``issues`` column, so intermediate data is always open for examination.
Only unreadable files or broken CSV framing abort a run; anything wrong
inside a row becomes an issue tag on that row's record.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from pathlib import Path

from .curl import HttpMethod
from .issues import Issue, Stage, make_issue
from .pathtemplate import parse_path_template
from .records import ApiCallRecord, ParsedArtifacts, RecordId

#: Input column order; stage outputs append ``issues``.
COLUMNS = (
    "record_id",
    "source_url",
    "http_method",
    "path",
    "curl_example",
    "parameters",
    "request_example",
    "response_example",
    "description",
    "group",
)
STAGE_COLUMNS = COLUMNS + ("issues",)

#: CSV columns whose non-empty cells must hold JSON.
_JSON_COLUMNS = ("parameters", "request_example", "response_example")

#: Separator for multiple id atoms in the record_id cell of stage files.
ID_SEPARATOR = "|"


class CorpusError(Exception):
    """Unreadable file or malformed CSV framing; the only fatal error class."""


def load_corpus(path: str | Path) -> list[ApiCallRecord]:
    """Load one CSV corpus; one record per data row, rows never skipped.

    Accepts both raw input files and stage outputs (which carry the extra
    ``issues`` column). Cells that fail to parse tag the record and the raw
    text is kept.
    """
    path = Path(path)
    try:
        # newline="" leaves quoted line breaks to the csv module, which is
        # also why splitting the text ourselves would corrupt exotic cells.
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    except csv.Error as exc:
        raise CorpusError(f"malformed CSV in {path}: {exc}") from exc
    if not rows:
        raise CorpusError(f"{path} has no header row")

    header = rows[0]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise CorpusError(f"{path} is missing columns: {', '.join(missing)}")
    index = {name: header.index(name) for name in header}

    records = []
    for row_number, row in enumerate(rows[1:], start=1):
        if len(row) > len(header):
            raise CorpusError(f"{path} row {row_number}: more cells than header columns")
        cells = {
            name: (row[i] if i < len(row) and row[i] != "" else None)
            for name, i in index.items()
        }
        records.append(_record_from_cells(cells, path.stem, row_number))
    return records


def _record_from_cells(cells: dict[str, str | None], stem: str, row_number: int) -> ApiCallRecord:
    issues: list[Issue] = []

    raw_id = cells.get("record_id")
    if raw_id:
        record_id = RecordId(ids=tuple(dict.fromkeys(raw_id.split(ID_SEPARATOR))))
    else:
        record_id = RecordId.single(f"{stem}:{row_number}")

    method_cell = cells.get("http_method")
    try:
        method = HttpMethod((method_cell or "").strip().upper())
    except ValueError:
        issues.append(
            make_issue(
                "E_METHOD_UNKNOWN",
                Stage.INGEST,
                f"http_method {method_cell!r} is not a supported method; assuming GET",
                field="http_method",
            )
        )
        method = HttpMethod.GET

    for column in _JSON_COLUMNS:
        value = cells.get(column)
        if value is None:
            continue
        try:
            json.loads(value)
        except ValueError as exc:
            issues.append(
                make_issue("E_JSON_CELL", Stage.INGEST, f"cell is not JSON: {exc}", field=column)
            )

    prior: list[Issue] = []
    issues_cell = cells.get("issues")
    if issues_cell is not None:
        try:
            prior = [Issue.from_json(obj) for obj in json.loads(issues_cell)]
        except (ValueError, KeyError, TypeError) as exc:
            issues.append(
                make_issue(
                    "E_JSON_CELL",
                    Stage.INGEST,
                    f"issues cell is not a valid issue list: {exc}",
                    field="issues",
                )
            )

    return ApiCallRecord(
        id=record_id,
        source_url=cells.get("source_url") or "",
        http_method=method,
        raw_path=cells.get("path") or "",
        raw_curl=cells.get("curl_example"),
        raw_parameters=cells.get("parameters"),
        request_example=cells.get("request_example"),
        response_example=cells.get("response_example"),
        description=cells.get("description"),
        group=cells.get("group"),
        issues=tuple(prior) + tuple(issues),
    )


def canonical_path(raw_path: str) -> str:
    """Canonical template string, or the raw string when it does not parse."""
    template, _ = parse_path_template(raw_path)
    if template is None:
        return raw_path
    return template.render()


def merge_key(record: ApiCallRecord) -> tuple[str, str]:
    return record.http_method.value, canonical_path(record.raw_path)


def merge_records(a: ApiCallRecord, b: ApiCallRecord) -> ApiCallRecord:
    """Merge two records describing the same call (equal method + canonical path).

    Identifiers are concatenated and deduped, issue lists concatenated, and
    missing fields filled from ``b``. Conflicting present values keep ``a``'s
    and tag W_MERGE_CONFLICT. If the records describe different calls the
    merge is refused: ``a`` comes back tagged E_MERGE_KEY_MISMATCH and both
    records survive separately.
    """
    if merge_key(a) != merge_key(b):
        return a.with_issues(
            make_issue(
                "E_MERGE_KEY_MISMATCH",
                Stage.INGEST,
                f"cannot merge {b.id} into {a.id}: method/path differ",
            )
        )

    conflicts: list[Issue] = []

    def pick(field_name: str, left, right):
        if left is None:
            return right
        if right is not None and left != right:
            conflicts.append(
                make_issue(
                    "W_MERGE_CONFLICT",
                    Stage.INGEST,
                    f"field {field_name} differs between {a.id} and {b.id}; keeping the first",
                    field=field_name,
                )
            )
        return left

    enrichment = None
    if a.enrichment is not None or b.enrichment is not None:
        ea = a.enrichment or ParsedArtifacts()
        eb = b.enrichment or ParsedArtifacts()
        enrichment = ParsedArtifacts(
            path=pick("artifacts.path", ea.path, eb.path),
            curl=pick("artifacts.curl", ea.curl, eb.curl),
            params=pick("artifacts.params", ea.params, eb.params),
        )

    return ApiCallRecord(
        id=a.id.merge(b.id),
        source_url=pick("source_url", a.source_url or None, b.source_url or None) or "",
        http_method=a.http_method,
        raw_path=a.raw_path,
        raw_curl=pick("curl_example", a.raw_curl, b.raw_curl),
        raw_parameters=pick("parameters", a.raw_parameters, b.raw_parameters),
        request_example=pick("request_example", a.request_example, b.request_example),
        response_example=pick("response_example", a.response_example, b.response_example),
        description=pick("description", a.description, b.description),
        group=pick("group", a.group, b.group),
        issues=a.issues + b.issues + tuple(conflicts),
        enrichment=enrichment,
    )


def merge_corpus(records: list[ApiCallRecord]) -> list[ApiCallRecord]:
    """Fold together all records sharing a merge key, in input order."""
    merged: dict[tuple[str, str], ApiCallRecord] = {}
    order: list[tuple[str, str]] = []
    for record in records:
        key = merge_key(record)
        if key in merged:
            merged[key] = merge_records(merged[key], record)
        else:
            merged[key] = record
            order.append(key)
    return [merged[key] for key in order]


def stage_csv_text(records: list[ApiCallRecord]) -> str:
    """Canonical stage-CSV serialization (also the basis of corpus digests)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(STAGE_COLUMNS)
    for record in records:
        writer.writerow(_record_to_row(record))
    return buffer.getvalue()


def write_stage(records: list[ApiCallRecord], path: str | Path) -> None:
    """Materialize records as a stage CSV (input schema plus ``issues``).

    ``load_corpus(write_stage(rs))`` reproduces every CSV-carried field and
    all issues. Derived in-memory artifacts are not serialized.
    """
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(stage_csv_text(records))
    except OSError as exc:
        raise CorpusError(f"cannot write stage file {path}: {exc}") from exc


def _record_to_row(record: ApiCallRecord) -> list[str]:
    return [
        ID_SEPARATOR.join(record.id.ids),
        record.source_url,
        record.http_method.value,
        record.raw_path,
        record.raw_curl or "",
        record.raw_parameters or "",
        record.request_example or "",
        record.response_example or "",
        record.description or "",
        record.group or "",
        json.dumps([issue.to_json() for issue in record.issues], ensure_ascii=False),
    ]


def record_id_census(records: list[ApiCallRecord]) -> Counter:
    """Multiset of id atoms; equal censuses certify record conservation."""
    census: Counter = Counter()
    for record in records:
        census.update(record.id.ids)
    return census
