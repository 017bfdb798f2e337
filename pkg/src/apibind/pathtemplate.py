"""HTTP request path templates: literal segments mixed with variables.

Documentation writes path variables as ``{name}`` or ``:name``; both are
canonicalized to the ``{name}`` form. Rendering a template reproduces its
canonical source string, so parse/render round-trips are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .issues import Issue, Stage, make_issue

_BRACE_VAR = re.compile(r"^\{([^{}]+)\}$")
_SUSPECT_ANGLE = re.compile(r"^<[^<>]+>$")


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Variable:
    name: str


Segment = Literal | Variable


@dataclass(frozen=True)
class PathTemplate:
    segments: tuple[Segment, ...]

    def variables(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.segments if isinstance(s, Variable))

    def render(self) -> str:
        return render_path_template(self)


def render_path_template(template: PathTemplate) -> str:
    """Canonical string form: '/'-joined segments with a leading '/'.

    The empty template renders as the root path '/'.
    """
    parts = []
    for seg in template.segments:
        if isinstance(seg, Variable):
            parts.append("{" + seg.name + "}")
        else:
            parts.append(seg.text)
    return "/" + "/".join(parts)


def parse_path_template(raw: str) -> tuple[PathTemplate | None, list[Issue]]:
    """Parse a documented request path into a template.

    Returns ``(template, issues)``; the template is None exactly when an
    E_PATH_SYNTAX error was found. Segments that merely look variable-ish
    (``<name>``, ``$name``, partial braces) stay literal and add a
    W_PATH_SUSPECT warning.
    """
    issues: list[Issue] = []
    if not raw:
        return None, [make_issue("E_PATH_SYNTAX", Stage.PARSE, "empty path", field="path")]

    body = raw[1:] if raw.startswith("/") else raw
    # A single trailing slash is tolerated and dropped from the canonical form.
    if body.endswith("/"):
        body = body[:-1]

    segments: list[Segment] = []
    seen: set[str] = set()
    pos = len(raw) - len(body)  # char offset of the current segment in raw
    for part in body.split("/") if body else []:
        err = _classify_segment(part, pos, segments, seen, issues)
        if err is not None:
            return None, [err]
        pos += len(part) + 1

    return PathTemplate(segments=tuple(segments)), issues


def _classify_segment(
    part: str,
    pos: int,
    segments: list[Segment],
    seen: set[str],
    issues: list[Issue],
) -> Issue | None:
    def syntax(msg: str) -> Issue:
        return make_issue("E_PATH_SYNTAX", Stage.PARSE, f"{msg} at offset {pos}", field="path")

    if part == "{}" or part == ":":
        return syntax("empty variable name")

    m = _BRACE_VAR.match(part)
    if m:
        name = m.group(1)
    elif part.startswith(":"):
        name = part[1:]
        if "{" in name or "}" in name:
            return syntax("unbalanced braces")
    else:
        if "{" in part or "}" in part:
            if _braces_balanced(part):
                issues.append(
                    make_issue(
                        "W_PATH_SUSPECT",
                        Stage.PARSE,
                        f"segment {part!r} mixes braces with literal text",
                        field="path",
                    )
                )
            else:
                return syntax("unbalanced braces")
        elif _SUSPECT_ANGLE.match(part) or part.startswith("$"):
            issues.append(
                make_issue(
                    "W_PATH_SUSPECT",
                    Stage.PARSE,
                    f"segment {part!r} looks like an unrecognized variable syntax",
                    field="path",
                )
            )
        segments.append(Literal(part))
        return None

    if name in seen:
        return syntax(f"duplicate variable {name!r}")
    seen.add(name)
    segments.append(Variable(name))
    return None


def _braces_balanced(text: str) -> bool:
    depth = 0
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0
