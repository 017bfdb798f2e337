"""Cross-checks, the generation gate, and the validation dashboard.

Every check runs on every record regardless of what already failed (late
filtering), so issue co-occurrence stays observable. Partitioning happens
only afterwards: records with any error go to the alternate output, and
nothing is ever silently dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .issues import Issue, Stage, make_issue, severity_of
from .params import Convention
from .records import ApiCallRecord

#: Names of the individual cross-checks, for selective runs in tests.
ALL_CHECKS = frozenset(
    {"pathvar_declared", "path_param_used", "dup_param", "method_match", "body_on_get", "examples"}
)


def cross_validate(
    record: ApiCallRecord, checks: frozenset[str] = ALL_CHECKS
) -> ApiCallRecord:
    """Run the consistency checks and append their findings.

    Expects ``parse_record`` to have run; checks whose inputs are absent are
    vacuously satisfied. ``checks`` narrows the set of checks that run and
    exists for check-independence testing.
    """
    artifacts = record.enrichment
    template = artifacts.path if artifacts else None
    curl = artifacts.curl if artifacts else None
    params = artifacts.params if artifacts else None

    path_vars = set(template.variables()) if template is not None else set()
    path_params = [p.name for p in params or () if p.convention is Convention.PATH]

    issues: list[Issue] = []

    if "pathvar_declared" in checks and template is not None:
        for name in template.variables():
            if name not in path_params:
                issues.append(
                    make_issue(
                        "E_PATHVAR_UNDECLARED",
                        Stage.VALIDATE,
                        f"path variable {name!r} has no declared path parameter",
                        field=name,
                    )
                )

    if "path_param_used" in checks and template is not None:
        for name in path_params:
            if name not in path_vars:
                issues.append(
                    make_issue(
                        "E_PARAM_PATH_UNUSED",
                        Stage.VALIDATE,
                        f"path parameter {name!r} does not appear in the path template",
                        field=name,
                    )
                )

    if "dup_param" in checks and params:
        seen: dict[tuple[Convention, str], int] = {}
        for p in params:
            seen[(p.convention, p.name)] = seen.get((p.convention, p.name), 0) + 1
        for (convention, name), count in seen.items():
            if count > 1:
                issues.append(
                    make_issue(
                        "E_DUP_PARAM",
                        Stage.VALIDATE,
                        f"parameter {name!r} appears {count} times as {convention.value}",
                        field=name,
                    )
                )

    if "method_match" in checks and curl is not None and curl.method != record.http_method:
        issues.append(
            make_issue(
                "E_METHOD_MISMATCH",
                Stage.VALIDATE,
                f"declared {record.http_method.value} but the curl example sends {curl.method.value}",
            )
        )

    if "body_on_get" in checks and record.http_method.value in ("GET", "HEAD"):
        if (curl is not None and curl.body is not None) or record.request_example is not None:
            issues.append(
                make_issue(
                    "W_BODY_ON_GET",
                    Stage.VALIDATE,
                    f"{record.http_method.value} call documents a request body",
                )
            )

    if "examples" in checks and record.request_example is None and record.response_example is None:
        issues.append(
            make_issue(
                "W_NO_EXAMPLE",
                Stage.VALIDATE,
                "record has neither a request nor a response example",
            )
        )

    return record.with_issues(*issues)


def route(
    records: list[ApiCallRecord], *, strict: bool = False
) -> tuple[list[ApiCallRecord], list[ApiCallRecord]]:
    """Partition into (valid, rejected); order within each side is preserved.

    Only error-severity issues reject a record; with ``strict`` any issue
    does. The two sides together are a permutation of the input.
    """
    valid: list[ApiCallRecord] = []
    rejected: list[ApiCallRecord] = []
    for record in records:
        blocking = len(record.issues) if strict else record.error_count()
        (rejected if blocking else valid).append(record)
    return valid, rejected


@dataclass(frozen=True)
class CodeFrequency:
    code: str
    count: int  # records carrying at least one issue with this code
    percent: float  # of total records


@dataclass(frozen=True)
class DashboardReport:
    total_records: int
    valid_records: int
    percent_valid: float | None
    issue_frequency: tuple[CodeFrequency, ...]
    per_stage_counts: tuple[tuple[str, int], ...]


def dashboard(records: list[ApiCallRecord]) -> DashboardReport:
    """Summary of corpus health: percent-correct plus issues ranked by impact.

    Impact is the number of records a code affects, which also breaks down
    the percentages; ties are ordered alphabetically by code.
    """
    total = len(records)
    valid = sum(1 for r in records if r.error_count() == 0)

    affected: dict[str, int] = {}
    stage_counts = {stage.value: 0 for stage in Stage}
    for record in records:
        for code in {issue.code for issue in record.issues}:
            affected[code] = affected.get(code, 0) + 1
        for issue in record.issues:
            stage_counts[issue.stage.value] += 1

    return DashboardReport(
        total_records=total,
        valid_records=valid,
        percent_valid=(valid / total * 100.0) if total else None,
        issue_frequency=_ranked(affected, total),
        per_stage_counts=tuple(stage_counts.items()),
    )


def _ranked(affected: dict[str, int], total: int) -> tuple[CodeFrequency, ...]:
    entries = [
        CodeFrequency(code=code, count=count, percent=(count / total * 100.0) if total else 0.0)
        for code, count in affected.items()
    ]
    entries.sort(key=lambda e: (-e.count, e.code))
    return tuple(entries)


def merge_dashboards(a: DashboardReport, b: DashboardReport) -> DashboardReport:
    """Combine reports over disjoint record sets; equals the dashboard of the union."""
    total = a.total_records + b.total_records
    valid = a.valid_records + b.valid_records

    affected: dict[str, int] = {}
    for report in (a, b):
        for entry in report.issue_frequency:
            affected[entry.code] = affected.get(entry.code, 0) + entry.count

    stage_counts = {stage.value: 0 for stage in Stage}
    for report in (a, b):
        for stage_name, count in report.per_stage_counts:
            stage_counts[stage_name] += count

    return DashboardReport(
        total_records=total,
        valid_records=valid,
        percent_valid=(valid / total * 100.0) if total else None,
        issue_frequency=_ranked(affected, total),
        per_stage_counts=tuple(stage_counts.items()),
    )


def dashboard_to_json(report: DashboardReport) -> str:
    """JSON document form; ``percent_valid`` is absent for an empty corpus."""
    doc: dict = {
        "total_records": report.total_records,
        "valid_records": report.valid_records,
    }
    if report.percent_valid is not None:
        doc["percent_valid"] = report.percent_valid
    doc["issue_frequency"] = [
        {"code": e.code, "count": e.count, "percent": e.percent} for e in report.issue_frequency
    ]
    doc["per_stage_counts"] = dict(report.per_stage_counts)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_dashboard_text(report: DashboardReport) -> str:
    """Aligned plain-text table for terminals and stage directories."""
    lines = []
    percent = f"{report.percent_valid:.1f}%" if report.percent_valid is not None else "n/a"
    lines.append(f"records      {report.total_records}")
    lines.append(f"valid        {report.valid_records} ({percent})")
    lines.append("")
    if report.issue_frequency:
        code_width = max(len(e.code) for e in report.issue_frequency)
        code_width = max(code_width, len("issue"))
        lines.append(f"{'issue':<{code_width}}  {'severity':<8}  {'records':>7}  {'pct':>6}")
        for e in report.issue_frequency:
            severity = severity_of(e.code).value
            lines.append(
                f"{e.code:<{code_width}}  {severity:<8}  {e.count:>7}  {e.percent:>5.1f}%"
            )
    else:
        lines.append("no issues")
    lines.append("")
    stages = "  ".join(f"{name}:{count}" for name, count in report.per_stage_counts)
    lines.append(f"issues by stage  {stages}")
    return "\n".join(lines) + "\n"
