"""Issue tags attached to records as they flow through the pipeline.

Every data-quality finding is a tag on a record, never an exception: records
keep flowing and carry their full issue history. The catalog below is the
single source of truth for which codes exist and what severity they carry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Severity(enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"


class Stage(enum.Enum):
    INGEST = "Ingest"
    PARSE = "Parse"
    INFER = "Infer"
    VALIDATE = "Validate"
    GENERATE = "Generate"


#: code -> (severity, description). E_* codes are errors and reject a record
#: at the generation gate; W_* codes are warnings and pass the default gate.
CATALOG: dict[str, tuple[Severity, str]] = {
    "E_JSON_CELL": (Severity.ERROR, "CSV cell expected to hold JSON does not parse"),
    "E_JSON_PARSE": (Severity.ERROR, "JSON document does not parse"),
    "E_PATH_SYNTAX": (Severity.ERROR, "path template violates the template grammar"),
    "E_CURL_TOKENIZE": (Severity.ERROR, "curl command line cannot be tokenized"),
    "E_CURL_NO_URL": (Severity.ERROR, "curl command has no URL"),
    "E_CURL_UNSUPPORTED": (Severity.ERROR, "curl command uses an unsupported feature"),
    "E_PARAM_NO_NAME": (Severity.ERROR, "parameter table entry has no name"),
    "E_PATHVAR_UNDECLARED": (Severity.ERROR, "path variable has no declared path parameter"),
    "E_PARAM_PATH_UNUSED": (Severity.ERROR, "path parameter does not appear in the path template"),
    "E_DUP_PARAM": (Severity.ERROR, "duplicate parameter name within one passing convention"),
    "E_METHOD_MISMATCH": (Severity.ERROR, "curl example method differs from the declared method"),
    "E_MERGE_KEY_MISMATCH": (Severity.ERROR, "merge refused: records describe different calls"),
    "E_METHOD_UNKNOWN": (Severity.ERROR, "http_method cell is not a supported HTTP method"),
    "W_CURL_OPT_IGNORED": (Severity.WARNING, "curl option not understood and skipped"),
    "W_PARAM_CONV_UNKNOWN": (Severity.WARNING, "parameter passing convention defaulted"),
    "W_PARAM_TYPE_DEFAULTED": (Severity.WARNING, "parameter type defaulted to string"),
    "W_PARAM_TYPE_CONFLICT": (Severity.WARNING, "parameter example conflicts with declared type"),
    "W_PARAM_TYPE_OPAQUE": (Severity.WARNING, "parameter declared as object with unknown fields"),
    "W_NO_EXAMPLE": (Severity.WARNING, "no example available"),
    "W_BODY_ON_GET": (Severity.WARNING, "request body present on a GET/HEAD call"),
    "W_MERGE_CONFLICT": (Severity.WARNING, "conflicting field values; first record's kept"),
    "W_PATH_SUSPECT": (Severity.WARNING, "path segment looks like an unrecognized variable syntax"),
    "W_EMPTY_ARRAY": (Severity.WARNING, "example contains an empty array; element type unknown"),
    "W_DECL_SHARED": (Severity.WARNING, "structurally identical type declarations were shared"),
}


@dataclass(frozen=True)
class Issue:
    """One error/warning tag. Severity is always derived from the code."""

    code: str
    severity: Severity
    stage: Stage
    message: str
    field: str | None = None

    def to_json(self) -> dict:
        out = {
            "code": self.code,
            "severity": self.severity.value,
            "stage": self.stage.value,
            "message": self.message,
        }
        if self.field is not None:
            out["field"] = self.field
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Issue:
        return cls(
            code=obj["code"],
            severity=Severity(obj["severity"]),
            stage=Stage(obj["stage"]),
            message=obj["message"],
            field=obj.get("field"),
        )


def make_issue(code: str, stage: Stage, message: str, field: str | None = None) -> Issue:
    """Build an Issue, taking severity from the catalog.

    Raises KeyError for codes outside the catalog: emitting an uncatalogued
    issue is a programming error, not a data-quality finding.
    """
    severity, _ = CATALOG[code]
    return Issue(code=code, severity=severity, stage=stage, message=message, field=field)


def severity_of(code: str) -> Severity:
    return CATALOG[code][0]
