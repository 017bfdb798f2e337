"""Deliberately small template engine: substitution and list repetition only.

``{{name}}`` substitutes a context value; ``{{#name}}...{{/name}}`` repeats
its body once per item of a list of dicts. There is no logic beyond that,
which keeps rendered output predictable enough for byte-exact golden tests.
A placeholder the context cannot resolve is a hard rendering error, never
silent emptiness.

A template set is five named templates; the built-in neutral set renders a
plain-text typed-interface description. Real-language sets are plain files
in a directory, so adding a target language is configuration, not code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

TEMPLATE_NAMES = (
    "manifest.tpl",
    "module_header.tpl",
    "function.tpl",
    "type.tpl",
    "doc_comment.tpl",
)

_TAG = re.compile(r"\{\{([#/]?)([A-Za-z0-9_]+)\}\}")


class TemplateError(Exception):
    """Malformed template or incomplete template set."""


class RenderError(Exception):
    """A placeholder or section could not be resolved against the context."""

    def __init__(self, template_name: str, detail: str):
        super().__init__(f"template {template_name!r}: {detail}")
        self.template_name = template_name


@dataclass(frozen=True)
class _Text:
    text: str


@dataclass(frozen=True)
class _Var:
    name: str


@dataclass(frozen=True)
class _Section:
    name: str
    children: tuple


class Template:
    def __init__(self, name: str, source: str):
        self.name = name
        self.nodes = self._parse(source)

    def _parse(self, source: str) -> tuple:
        stack: list[tuple[str | None, list]] = [(None, [])]
        pos = 0
        for match in _TAG.finditer(source):
            if match.start() > pos:
                stack[-1][1].append(_Text(source[pos : match.start()]))
            kind, name = match.groups()
            if kind == "#":
                stack.append((name, []))
            elif kind == "/":
                open_name, children = stack.pop()
                if open_name != name:
                    raise TemplateError(
                        f"template {self.name!r}: section {open_name!r} closed as {name!r}"
                    )
                stack[-1][1].append(_Section(name, tuple(children)))
            else:
                stack[-1][1].append(_Var(name))
            pos = match.end()
        if pos < len(source):
            stack[-1][1].append(_Text(source[pos:]))
        if len(stack) != 1:
            raise TemplateError(f"template {self.name!r}: unclosed section {stack[-1][0]!r}")
        return tuple(stack[0][1])

    def render(self, context: dict) -> str:
        return self._render_nodes(self.nodes, [context])

    def _render_nodes(self, nodes: tuple, frames: list[dict]) -> str:
        out: list[str] = []
        for node in nodes:
            if isinstance(node, _Text):
                out.append(node.text)
            elif isinstance(node, _Var):
                out.append(self._format(self._lookup(node.name, frames)))
            else:
                value = self._lookup(node.name, frames)
                if not isinstance(value, list):
                    raise RenderError(self.name, f"section {node.name!r} is not a list")
                for item in value:
                    if not isinstance(item, dict):
                        raise RenderError(self.name, f"section {node.name!r} items must be objects")
                    out.append(self._render_nodes(node.children, frames + [item]))
        return "".join(out)

    def _lookup(self, name: str, frames: list[dict]):
        for frame in reversed(frames):
            if name in frame:
                return frame[name]
        raise RenderError(self.name, f"unknown placeholder {name!r}")

    def _format(self, value) -> str:
        if isinstance(value, str):
            return value
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (int, float)):
            return str(value)
        raise RenderError(self.name, f"value {value!r} is not renderable")


@dataclass(frozen=True)
class TemplateSet:
    manifest: Template
    module_header: Template
    function: Template
    type: Template
    doc_comment: Template

    @classmethod
    def from_sources(cls, sources: dict[str, str]) -> TemplateSet:
        missing = [name for name in TEMPLATE_NAMES if name not in sources]
        if missing:
            raise TemplateError(f"template set incomplete, missing: {', '.join(missing)}")
        return cls(
            manifest=Template("manifest.tpl", sources["manifest.tpl"]),
            module_header=Template("module_header.tpl", sources["module_header.tpl"]),
            function=Template("function.tpl", sources["function.tpl"]),
            type=Template("type.tpl", sources["type.tpl"]),
            doc_comment=Template("doc_comment.tpl", sources["doc_comment.tpl"]),
        )

    @classmethod
    def load_dir(cls, directory: str | Path) -> TemplateSet:
        directory = Path(directory)
        sources: dict[str, str] = {}
        for name in TEMPLATE_NAMES:
            path = directory / name
            if path.is_file():
                sources[name] = path.read_text(encoding="utf-8")
        return cls.from_sources(sources)

    @classmethod
    def neutral(cls) -> TemplateSet:
        return cls.from_sources(dict(NEUTRAL_TEMPLATES))


# The built-in target: a typed-interface description. One line per concept;
# sections sit flush with the repeated chunk because the engine does no
# standalone-line stripping.
NEUTRAL_TEMPLATES: dict[str, str] = {
    "manifest.tpl": (
        "package {{package_name}}\n"
        "version {{package_version}}\n"
        "source-digest {{corpus_digest}}\n"
        "functions {{function_count}}\n"
        "types {{type_count}}\n"
        "modules\n"
        "{{#modules}}  {{module_file}}\n"
        "{{/modules}}"
    ),
    "module_header.tpl": (
        "module {{module_name}}\n"
        "package {{package_name}} {{package_version}}\n"
        "\n"
    ),
    "function.tpl": (
        "function {{function_name}}({{#signature_params}}{{param_name}}: {{param_type}}{{sep}}{{/signature_params}}) -> {{response_type}}\n"
        "  method {{http_method}}\n"
        "  path {{path_template}}\n"
        "{{#param_lines}}  param {{param_name}} via {{convention}}{{required_mark}}{{wire_note}}\n"
        "{{/param_lines}}"
        "\n"
    ),
    "type.tpl": (
        "type {{type_name}} = {\n"
        "{{#fields}}  {{field_name}}{{optional_mark}}: {{field_type}}{{wire_note}}\n"
        "{{/fields}}"
        "}\n"
        "\n"
    ),
    "doc_comment.tpl": (
        "-- {{summary}}\n"
        "-- docs: {{doc_url}}\n"
    ),
}
