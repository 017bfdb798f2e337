"""Run the three documentation parsers over a record (the parse stage).

Each sub-parser runs independently on whichever raw field is present; a
failure in one never stops the others, and every finding lands on the
record as an issue. Parsing never aborts a record.
"""

from __future__ import annotations

from .curl import parse_curl
from .issues import Issue, Stage, make_issue
from .params import parse_parameter_table
from .pathtemplate import parse_path_template
from .records import ApiCallRecord, ParsedArtifacts


def parse_record(record: ApiCallRecord) -> ApiCallRecord:
    """Attach ParsedArtifacts and tag every parser finding."""
    issues: list[Issue] = []

    path_template = None
    if record.raw_path:
        path_template, path_issues = parse_path_template(record.raw_path)
        issues.extend(path_issues)
    else:
        issues.append(make_issue("E_PATH_SYNTAX", Stage.PARSE, "record has no path", field="path"))

    curl_request = None
    if record.raw_curl is not None:
        curl_request, curl_issues = parse_curl(record.raw_curl)
        issues.extend(curl_issues)

    params = None
    if record.raw_parameters is not None:
        parsed, param_issues = parse_parameter_table(record.raw_parameters, record.http_method)
        params = tuple(parsed)
        issues.extend(param_issues)

    if record.raw_curl is None and record.request_example is None and record.response_example is None:
        issues.append(
            make_issue(
                "W_NO_EXAMPLE",
                Stage.PARSE,
                "record carries no use example and no request/response example",
            )
        )

    artifacts = ParsedArtifacts(path=path_template, curl=curl_request, params=params)
    return record.with_enrichment(artifacts).with_issues(*issues)
