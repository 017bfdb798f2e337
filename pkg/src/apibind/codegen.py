"""From validated records to a rendered binding package.

Three steps, cleanly separated: ``build_reference`` folds valid records
into a language-independent inventory of call functions and type
declarations; ``apply_identifier_policy`` maps every raw name to a legal
target identifier (recording the mapping); ``render_package`` writes the
package from a template set. Only the identifier policy and the templates
know anything about the target language.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .curl import HttpMethod
from .ingest import stage_csv_text
from .issues import Issue, Stage, make_issue
from .params import Convention, Parameter
from .pathtemplate import PathTemplate, Variable
from .records import ApiCallRecord, RecordId
from .templates import TemplateSet
from .typeinfer import (
    DeclOrigin,
    FieldType,
    InferredType,
    JsonParseError,
    TArray,
    TObject,
    TRef,
    TUnion,
    TypeDecl,
    T_ANY,
    _Atom,
    empty_array_paths,
    infer_from_examples,
    lift_declarations,
    parse_json,
    type_of_parameter,
)

_CONVENTION_ORDER = (
    Convention.PATH,
    Convention.QUERY,
    Convention.BODY_JSON,
    Convention.BODY_TEXT,
    Convention.HEADER,
    Convention.COOKIE,
)


@dataclass(frozen=True)
class PackageMeta:
    name: str
    version: str  # corpus digest prefix: reproducible without external state
    corpus_digest: str


@dataclass(frozen=True)
class BindingFunction:
    raw_name: str
    method: HttpMethod
    path: PathTemplate
    params: tuple[tuple[Parameter, InferredType], ...]
    request_type: InferredType | None
    response_type: InferredType
    doc_url: str
    doc_summary: str | None
    record_id: RecordId


@dataclass(frozen=True)
class BindingIr:
    functions: tuple[BindingFunction, ...]
    decls: tuple[TypeDecl, ...]
    groups: tuple[tuple[str, tuple[str, ...]], ...]  # group -> function raw names
    package_meta: PackageMeta
    report: tuple[tuple[str, Issue], ...]  # (record id, issue) build findings


def function_raw_name(method: HttpMethod, template: PathTemplate) -> str:
    """Deterministic raw name: lowercased method plus path words, '_'-joined."""
    parts = [method.value.lower()]
    for segment in template.segments:
        text = segment.name if isinstance(segment, Variable) else segment.text
        word = re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_").lower()
        if word:
            parts.append(word)
    return "_".join(parts)


def ordered_params(params: tuple[Parameter, ...]) -> list[Parameter]:
    """Group by passing convention, preserving documentation order within each."""
    rank = {conv: i for i, conv in enumerate(_CONVENTION_ORDER)}
    return sorted(params, key=lambda p: rank[p.convention])


def corpus_digest(records: list[ApiCallRecord]) -> str:
    return hashlib.sha256(stage_csv_text(records).encode("utf-8")).hexdigest()


def build_reference(
    valid_records: list[ApiCallRecord], package_name: str = "api"
) -> BindingIr:
    """Fold gate-passing records into the reference structure.

    One function per record; request/response types are inferred from the
    examples and lifted into declarations, with structural sharing across
    the whole corpus. Records must have been parsed and routed: a record
    without a parsed path is a caller error here, not a data issue.
    """
    functions: list[BindingFunction] = []
    decls: list[TypeDecl] = []
    report: list[tuple[str, Issue]] = []
    groups: dict[str, list[str]] = {}
    taken_fn: set[str] = set()
    registry: dict[TObject, str] = {}
    taken_decl: set[str] = set()

    def intern_decls(
        lifted: InferredType, new_decls: list[TypeDecl], rid: str
    ) -> InferredType:
        rename: dict[str, str] = {}
        for decl in new_decls:
            body = _rename_refs(decl.body, rename)
            assert isinstance(body, TObject)
            if body in registry:
                kept = registry[body]
                rename[decl.name] = kept
                report.append(
                    (
                        rid,
                        make_issue(
                            "W_DECL_SHARED",
                            Stage.INFER,
                            f"type {decl.name!r} is structurally identical to {kept!r}; "
                            "sharing one declaration",
                        ),
                    )
                )
                continue
            final = decl.name
            suffix = 2
            while final in taken_decl:
                final = f"{decl.name}_{suffix}"
                suffix += 1
            if final != decl.name:
                rename[decl.name] = final
            taken_decl.add(final)
            registry[body] = final
            decls.append(
                TypeDecl(name=final, body=body, origin=decl.origin, source_record=decl.source_record)
            )
        return _rename_refs(lifted, rename)

    def example_type(
        record: ApiCallRecord, text: str | None, base: str, origin: DeclOrigin, column: str
    ) -> InferredType | None:
        rid = str(record.id)
        if text is None:
            return None
        try:
            doc = parse_json(text)
        except JsonParseError as exc:
            report.append(
                (rid, make_issue("E_JSON_PARSE", Stage.INFER, str(exc), field=column))
            )
            return None
        for path in empty_array_paths(doc):
            report.append(
                (
                    rid,
                    make_issue(
                        "W_EMPTY_ARRAY",
                        Stage.INFER,
                        f"{column} has an empty array at {path}; element type unknown",
                        field=column,
                    ),
                )
            )
        inferred = infer_from_examples([doc])
        lifted, new_decls, lift_issues = lift_declarations(
            inferred, base, origin=origin, source_record=record.id
        )
        report.extend((rid, issue) for issue in lift_issues)
        return intern_decls(lifted, new_decls, rid)

    for record in valid_records:
        if record.enrichment is None or record.enrichment.path is None:
            raise ValueError(
                f"record {record.id} has no parsed path template; run parse and route first"
            )
        template = record.enrichment.path
        rid = str(record.id)

        raw_name = function_raw_name(record.http_method, template)
        if raw_name in taken_fn:
            base = raw_name
            suffix = 2
            while f"{base}_{suffix}" in taken_fn:
                suffix += 1
            raw_name = f"{base}_{suffix}"
            report.append(
                (
                    rid,
                    make_issue(
                        "W_MERGE_CONFLICT",
                        Stage.GENERATE,
                        f"function name {base!r} already taken; this record renders as {raw_name!r}",
                    ),
                )
            )
        taken_fn.add(raw_name)

        typed_params: list[tuple[Parameter, InferredType]] = []
        for param in ordered_params(record.enrichment.params or ()):
            param_type, param_issues = type_of_parameter(param)
            typed_params.append((param, param_type))
            report.extend((rid, issue) for issue in param_issues)

        camel = _upper_camel(raw_name)
        request_type = example_type(
            record, record.request_example, camel + "Request", DeclOrigin.REQUEST, "request_example"
        )
        response_type = example_type(
            record,
            record.response_example,
            camel + "Response",
            DeclOrigin.RESPONSE,
            "response_example",
        )
        if response_type is None:
            if record.response_example is None:
                report.append(
                    (
                        rid,
                        make_issue(
                            "W_NO_EXAMPLE",
                            Stage.INFER,
                            "no response example; response type is unconstrained",
                            field="response_example",
                        ),
                    )
                )
            response_type = T_ANY

        functions.append(
            BindingFunction(
                raw_name=raw_name,
                method=record.http_method,
                path=template,
                params=tuple(typed_params),
                request_type=request_type,
                response_type=response_type,
                doc_url=record.source_url,
                doc_summary=record.description,
                record_id=record.id,
            )
        )
        groups.setdefault(record.group or "misc", []).append(raw_name)

    digest = corpus_digest(valid_records)
    meta = PackageMeta(name=package_name, version=digest[:12], corpus_digest=digest)
    return BindingIr(
        functions=tuple(functions),
        decls=tuple(decls),
        groups=tuple((name, tuple(raws)) for name, raws in groups.items()),
        package_meta=meta,
        report=tuple(report),
    )


def _rename_refs(t: InferredType, rename: dict[str, str]) -> InferredType:
    if not rename:
        return t
    if isinstance(t, TRef):
        return TRef(rename.get(t.name, t.name))
    if isinstance(t, TArray):
        return TArray(_rename_refs(t.elem, rename))
    if isinstance(t, TObject):
        return TObject(
            tuple((n, FieldType(_rename_refs(f.type, rename), f.required)) for n, f in t.fields)
        )
    if isinstance(t, TUnion):
        return TUnion(tuple(_rename_refs(b, rename) for b in t.branches))
    return t


def _upper_camel(raw: str) -> str:
    return "".join(word.capitalize() for word in split_words(raw))


# --- identifier policy ------------------------------------------------------

CASINGS = ("lower-camel", "upper-camel", "snake")

_DEFAULT_RESERVED = frozenset(
    {"type", "class", "function", "return", "import", "if", "else", "for", "while", "package"}
)

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class IdentifierPolicy:
    """Target-language naming rules: casing, reserved words, collisions."""

    casing_function: str = "lower-camel"
    casing_type: str = "upper-camel"
    casing_field: str = "snake"
    reserved_words: frozenset[str] = _DEFAULT_RESERVED

    def __post_init__(self):
        for casing in (self.casing_function, self.casing_type, self.casing_field):
            if casing not in CASINGS:
                raise ValueError(f"unknown casing {casing!r}; expected one of {CASINGS}")

    @classmethod
    def from_json_file(cls, path: str | Path) -> IdentifierPolicy:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            casing_function=doc.get("casing_function", "lower-camel"),
            casing_type=doc.get("casing_type", "upper-camel"),
            casing_field=doc.get("casing_field", "snake"),
            reserved_words=frozenset(doc.get("reserved_words", sorted(_DEFAULT_RESERVED))),
        )


def split_words(raw: str) -> list[str]:
    """Split a raw name on separators ('-', '.', '/', '_') and camel bounds."""
    words: list[str] = []
    for chunk in re.split(r"[-._/\s]+", raw):
        if chunk:
            words.extend(
                m.group(0)
                for m in re.finditer(r"[A-Z]+(?![a-z0-9])|[A-Z][a-z0-9]*|[a-z0-9]+", chunk)
            )
    return [w.lower() for w in words]


def apply_casing(raw: str, casing: str) -> str:
    words = split_words(raw) or ["x"]
    if casing == "snake":
        out = "_".join(words)
    elif casing == "lower-camel":
        out = words[0] + "".join(w.capitalize() for w in words[1:])
    else:
        out = "".join(w.capitalize() for w in words)
    if not re.match(r"[A-Za-z_]", out):
        out = "_" + out
    return out


class _Namespace:
    """Injective raw -> identifier mapping for one namespace."""

    def __init__(self, casing: str, reserved: frozenset[str]):
        self.casing = casing
        self.reserved = reserved
        self.taken: set[str] = set()
        self.mapping: dict[str, str] = {}

    def assign(self, raw: str) -> str:
        if raw in self.mapping:
            return self.mapping[raw]
        name = apply_casing(raw, self.casing)
        while name in self.reserved:
            name += "_"
        final = name
        suffix = 2
        while final in self.taken:
            final = f"{name}_{suffix}"
            suffix += 1
        self.taken.add(final)
        self.mapping[raw] = final
        assert _IDENTIFIER.match(final), final
        return final


def format_type(t: InferredType, type_names: dict[str, str] | None = None) -> str:
    """Type expression in the neutral grammar; declaration refs use final names."""
    if isinstance(t, _Atom):
        return t.label
    if isinstance(t, TRef):
        return type_names.get(t.name, t.name) if type_names else t.name
    if isinstance(t, TArray):
        return f"[{format_type(t.elem, type_names)}]"
    if isinstance(t, TUnion):
        return " | ".join(format_type(b, type_names) for b in t.branches)
    if isinstance(t, TObject):
        if not t.fields:
            return "{}"
        inner = ", ".join(
            f"{name}{'' if field.required else '?'}: {format_type(field.type, type_names)}"
            for name, field in t.fields
        )
        return "{" + inner + "}"
    raise TypeError(f"cannot format {t!r}")


@dataclass(frozen=True)
class NamedField:
    wire: str  # name as it travels on the wire
    name: str
    type_expr: str
    required: bool


@dataclass(frozen=True)
class NamedDecl:
    name: str
    decl: TypeDecl
    fields: tuple[NamedField, ...]


@dataclass(frozen=True)
class NamedParam:
    wire: str
    name: str
    type_expr: str
    convention: Convention
    required: bool | None


@dataclass(frozen=True)
class NamedFunction:
    name: str
    fn: BindingFunction
    params: tuple[NamedParam, ...]
    body_param: str | None
    request_type_expr: str | None
    response_type_expr: str


@dataclass(frozen=True)
class NamedIr:
    functions: tuple[NamedFunction, ...]
    decls: tuple[NamedDecl, ...]
    groups: tuple[tuple[str, tuple[str, ...]], ...]
    package_meta: PackageMeta
    name_maps: dict


def apply_identifier_policy(ir: BindingIr, policy: IdentifierPolicy) -> NamedIr:
    """Map every raw name to a final identifier, recording raw -> final.

    Functions and types each share one corpus-wide namespace; fields and
    function parameters get one namespace per declaration or function.
    """
    fn_ns = _Namespace(policy.casing_function, policy.reserved_words)
    type_ns = _Namespace(policy.casing_type, policy.reserved_words)
    type_names = {decl.name: type_ns.assign(decl.name) for decl in ir.decls}

    named_decls = []
    field_maps: dict[str, dict[str, str]] = {}
    for decl in ir.decls:
        field_ns = _Namespace(policy.casing_field, policy.reserved_words)
        fields = tuple(
            NamedField(
                wire=name,
                name=field_ns.assign(name),
                type_expr=format_type(field.type, type_names),
                required=field.required,
            )
            for name, field in decl.body.fields
        )
        named_decls.append(NamedDecl(name=type_names[decl.name], decl=decl, fields=fields))
        field_maps[type_names[decl.name]] = dict(field_ns.mapping)

    named_functions = []
    for fn in ir.functions:
        final = fn_ns.assign(fn.raw_name)
        param_ns = _Namespace(policy.casing_field, policy.reserved_words)
        params = tuple(
            NamedParam(
                wire=param.name,
                name=param_ns.assign(param.name),
                type_expr=format_type(param_type, type_names),
                convention=param.convention,
                required=param.required,
            )
            for param, param_type in fn.params
        )
        body_param = param_ns.assign("body") if fn.request_type is not None else None
        named_functions.append(
            NamedFunction(
                name=final,
                fn=fn,
                params=params,
                body_param=body_param,
                request_type_expr=(
                    format_type(fn.request_type, type_names) if fn.request_type is not None else None
                ),
                response_type_expr=format_type(fn.response_type, type_names),
            )
        )

    name_maps = {
        "functions": dict(fn_ns.mapping),
        "types": dict(type_ns.mapping),
        "fields": field_maps,
    }
    return NamedIr(
        functions=tuple(named_functions),
        decls=tuple(named_decls),
        groups=ir.groups,
        package_meta=ir.package_meta,
        name_maps=name_maps,
    )


# --- rendering --------------------------------------------------------------


class GenerationError(Exception):
    pass


def render_package(ir: NamedIr, templates: TemplateSet, out_dir: str | Path) -> list[Path]:
    """Write the package tree; returns written paths, manifest last.

    Output is a pure function of (ir, templates): rendering the same inputs
    twice produces byte-identical trees.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = ir.package_meta
    base_ctx = {
        "package_name": meta.name,
        "package_version": meta.version,
        "corpus_digest": meta.corpus_digest,
    }

    fn_by_raw = {nf.fn.raw_name: nf for nf in ir.functions}
    groups_sorted = sorted(ir.groups, key=lambda kv: kv[0])
    assignment = _assign_decls(ir, groups_sorted, fn_by_raw)

    module_ns = _Namespace("snake", frozenset())
    written: list[Path] = []
    module_entries = []
    for group, raw_names in groups_sorted:
        module_name = module_ns.assign(group)
        file_name = f"{module_name}.txt"
        parts = [templates.module_header.render({**base_ctx, "module_name": module_name})]
        for decl in ir.decls:
            if assignment.get(decl.name) == group:
                parts.append(templates.type.render({**base_ctx, **_type_ctx(decl)}))
        for raw in raw_names:
            nf = fn_by_raw[raw]
            parts.append(templates.doc_comment.render({**base_ctx, **_doc_ctx(nf)}))
            parts.append(templates.function.render({**base_ctx, **_fn_ctx(nf)}))
        path = out_dir / file_name
        _write(path, "".join(parts))
        written.append(path)
        module_entries.append({"module_file": file_name})

    manifest_text = templates.manifest.render(
        {
            **base_ctx,
            "function_count": len(ir.functions),
            "type_count": len(ir.decls),
            "modules": module_entries,
        }
    )
    manifest_path = out_dir / "manifest.txt"
    _write(manifest_path, manifest_text)
    written.append(manifest_path)
    return written


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise GenerationError(f"cannot write {path}: {exc}") from exc


def _assign_decls(
    ir: NamedIr,
    groups_sorted: list[tuple[str, tuple[str, ...]]],
    fn_by_raw: dict[str, NamedFunction],
) -> dict[str, str]:
    """Each declaration renders in the first module (sorted order) that reaches it.

    Reachability runs in raw-name space (declaration bodies reference raw
    names); the returned assignment is keyed by final name.
    """
    body_by_raw = {nd.decl.name: nd.decl.body for nd in ir.decls}

    def refs_in(t: InferredType, acc: set[str]) -> None:
        if isinstance(t, TRef):
            acc.add(t.name)
        elif isinstance(t, TArray):
            refs_in(t.elem, acc)
        elif isinstance(t, TObject):
            for _, field in t.fields:
                refs_in(field.type, acc)
        elif isinstance(t, TUnion):
            for branch in t.branches:
                refs_in(branch, acc)

    assignment: dict[str, str] = {}
    for group, raw_names in groups_sorted:
        frontier: set[str] = set()
        for raw in raw_names:
            fn = fn_by_raw[raw].fn
            if fn.request_type is not None:
                refs_in(fn.request_type, frontier)
            refs_in(fn.response_type, frontier)
            for _, param_type in fn.params:
                refs_in(param_type, frontier)
        reachable: set[str] = set()
        while frontier:
            name = frontier.pop()
            if name in reachable:
                continue
            reachable.add(name)
            if name in body_by_raw:
                refs_in(body_by_raw[name], frontier)
        for nd in ir.decls:
            if nd.decl.name in reachable and nd.name not in assignment:
                assignment[nd.name] = group
    return assignment


def _type_ctx(decl: NamedDecl) -> dict:
    return {
        "type_name": decl.name,
        "fields": [
            {
                "field_name": f.name,
                "optional_mark": "" if f.required else "?",
                "field_type": f.type_expr,
                "wire_note": f"  (wire {f.wire})" if f.name != f.wire else "",
            }
            for f in decl.fields
        ],
    }


def _doc_ctx(nf: NamedFunction) -> dict:
    fn = nf.fn
    summary = fn.doc_summary or f"{fn.method.value} {fn.path.render()}"
    return {"summary": summary, "doc_url": fn.doc_url}


def _fn_ctx(nf: NamedFunction) -> dict:
    fn = nf.fn
    signature = [{"param_name": p.name, "param_type": p.type_expr} for p in nf.params]
    if nf.body_param is not None:
        signature.append({"param_name": nf.body_param, "param_type": nf.request_type_expr})
    for i, entry in enumerate(signature):
        entry["sep"] = ", " if i < len(signature) - 1 else ""

    param_lines = []
    for p in nf.params:
        required_mark = ""
        if p.required is True:
            required_mark = " required"
        elif p.required is False:
            required_mark = " optional"
        param_lines.append(
            {
                "param_name": p.name,
                "convention": p.convention.value,
                "required_mark": required_mark,
                "wire_note": f" (wire {p.wire})" if p.name != p.wire else "",
            }
        )

    return {
        "function_name": nf.name,
        "signature_params": signature,
        "response_type": nf.response_type_expr,
        "http_method": fn.method.value,
        "path_template": fn.path.render(),
        "param_lines": param_lines,
    }
