"""The record that flows through the pipeline, gradually enriched.

A record is never dropped and never loses information: issues are
append-only, and derived artifacts are attached once and kept. All types
here are immutable; stages return new records.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .curl import CurlRequest, HttpMethod
from .issues import Issue, Severity
from .params import Parameter
from .pathtemplate import PathTemplate


@dataclass(frozen=True)
class RecordId:
    """Non-empty ordered set of opaque id atoms; merging concatenates and dedupes."""

    ids: tuple[str, ...]

    def __post_init__(self):
        if not self.ids:
            raise ValueError("RecordId must hold at least one id")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("RecordId atoms must be unique")

    @classmethod
    def single(cls, atom: str) -> RecordId:
        return cls(ids=(atom,))

    def merge(self, other: RecordId) -> RecordId:
        merged = list(self.ids)
        for atom in other.ids:
            if atom not in merged:
                merged.append(atom)
        return RecordId(ids=tuple(merged))

    def __str__(self) -> str:
        return "|".join(self.ids)


@dataclass(frozen=True)
class ParsedArtifacts:
    """Outputs of the three documentation parsers; each field is set once."""

    path: PathTemplate | None = None
    curl: CurlRequest | None = None
    params: tuple[Parameter, ...] | None = None


@dataclass(frozen=True)
class ApiCallRecord:
    id: RecordId
    source_url: str
    http_method: HttpMethod
    raw_path: str
    raw_curl: str | None = None
    raw_parameters: str | None = None
    request_example: str | None = None
    response_example: str | None = None
    description: str | None = None
    group: str | None = None
    issues: tuple[Issue, ...] = ()
    enrichment: ParsedArtifacts | None = None

    def with_issues(self, *new_issues: Issue) -> ApiCallRecord:
        """Append issues; an exact duplicate of an existing tag is skipped.

        Skipping identical re-emissions keeps reruns over already-analyzed
        stage files idempotent without ever removing another stage's tags.
        """
        added = [issue for issue in new_issues if issue not in self.issues]
        if not added:
            return self
        return replace(self, issues=self.issues + tuple(added))

    def with_enrichment(self, artifacts: ParsedArtifacts) -> ApiCallRecord:
        """Attach parser outputs; fields already set are never overwritten."""
        if self.enrichment is None:
            return replace(self, enrichment=artifacts)
        current = self.enrichment
        merged = ParsedArtifacts(
            path=current.path if current.path is not None else artifacts.path,
            curl=current.curl if current.curl is not None else artifacts.curl,
            params=current.params if current.params is not None else artifacts.params,
        )
        return replace(self, enrichment=merged)

    def error_count(self) -> int:
        return sum(1 for issue in self.issues if issue.severity is Severity.ERROR)
