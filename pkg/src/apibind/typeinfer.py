"""Union-type inference over JSON example documents.

Types form a join-semilattice: ``unify`` computes the least upper bound of
two types, and a set of example documents is typed by folding ``unify``
over the per-document types starting from the bottom seed. Heterogeneous
scalars meet in unions, object types merge field-wise (a field missing on
one side becomes optional), and integers widen to floats rather than
forming a union, matching every target language's numeric tower.

The bottom seed is internal: any residue it leaves (an array no example
ever populated) is published as the unconstrained type.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

from .issues import Issue, Stage, make_issue
from .params import Parameter
from .records import RecordId


class InferredType:
    """Base of the type lattice; concrete kinds below."""

    __slots__ = ()


@dataclass(frozen=True)
class _Atom(InferredType):
    label: str

    def __repr__(self) -> str:
        return self.label


BOTTOM = _Atom("bottom")
T_NULL = _Atom("null")
T_BOOL = _Atom("bool")
T_INT = _Atom("int")
T_FLOAT = _Atom("float")
T_STRING = _Atom("string")
T_ANY = _Atom("any")


@dataclass(frozen=True)
class FieldType:
    type: InferredType
    required: bool


@dataclass(frozen=True)
class TArray(InferredType):
    elem: InferredType


@dataclass(frozen=True)
class TObject(InferredType):
    #: (name, field) pairs, kept sorted by name so equality is structural.
    fields: tuple[tuple[str, FieldType], ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(sorted(self.fields, key=lambda kv: kv[0])))

    def field_map(self) -> dict[str, FieldType]:
        return dict(self.fields)


@dataclass(frozen=True)
class TUnion(InferredType):
    branches: tuple[InferredType, ...]

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError("a union needs at least two branches")
        object.__setattr__(self, "branches", tuple(sorted(self.branches, key=_sort_key)))


@dataclass(frozen=True)
class TRef(InferredType):
    """Named reference to a lifted object declaration (post-lift trees only)."""

    name: str


_ATOM_RANK = {"null": 0, "bool": 1, "int": 2, "float": 3, "string": 4, "any": 8, "bottom": 9}


def _sort_key(t: InferredType) -> tuple:
    if isinstance(t, _Atom):
        return (_ATOM_RANK[t.label], "")
    if isinstance(t, TArray):
        return (5, repr(t))
    if isinstance(t, TObject):
        return (6, repr(t))
    if isinstance(t, TRef):
        return (7, t.name)
    return (10, repr(t))


class JsonParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def parse_json(text: str):
    """Parse standard JSON; integral lexemes become int, others float.

    A lexeme with a decimal point or exponent is non-integral even when its
    value is whole (``1e3`` types as float). NaN/Infinity are rejected.
    """

    def reject(token: str):
        raise JsonParseError(f"non-standard JSON token {token}", 0)

    try:
        return json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as exc:
        raise JsonParseError(exc.msg, exc.pos) from exc


def unify(a: InferredType, b: InferredType) -> InferredType:
    """Least upper bound of two types (total, commutative, associative)."""
    return _unify_cached(a, b)


@lru_cache(maxsize=None)
def _unify_cached(a: InferredType, b: InferredType) -> InferredType:
    return _normalize(_branches_of(a) + _branches_of(b))


def _branches_of(t: InferredType) -> tuple[InferredType, ...]:
    if t == BOTTOM:
        return ()
    if isinstance(t, TUnion):
        return t.branches
    return (t,)


def _normalize(branches: tuple[InferredType, ...]) -> InferredType:
    """Collapse a branch list into canonical form, merging within families."""
    has_null = has_bool = has_string = False
    numeric: InferredType | None = None
    array: TArray | None = None
    obj: TObject | None = None
    refs: dict[str, TRef] = {}

    for br in branches:
        if br == T_ANY:
            return T_ANY
        if br == BOTTOM:
            continue
        if br == T_NULL:
            has_null = True
        elif br == T_BOOL:
            has_bool = True
        elif br == T_STRING:
            has_string = True
        elif br == T_INT or br == T_FLOAT:
            if numeric is None:
                numeric = br
            elif numeric != br:
                numeric = T_FLOAT
        elif isinstance(br, TArray):
            array = br if array is None else TArray(unify(array.elem, br.elem))
        elif isinstance(br, TObject):
            obj = br if obj is None else _merge_objects(obj, br)
        elif isinstance(br, TRef):
            refs[br.name] = br
        else:  # pragma: no cover - guarded by the type grammar
            raise TypeError(f"cannot normalize {br!r}")

    out: list[InferredType] = []
    if has_null:
        out.append(T_NULL)
    if has_bool:
        out.append(T_BOOL)
    if numeric is not None:
        out.append(numeric)
    if has_string:
        out.append(T_STRING)
    if array is not None:
        out.append(array)
    if obj is not None:
        out.append(obj)
    out.extend(refs[name] for name in sorted(refs))

    if not out:
        return BOTTOM
    if len(out) == 1:
        return out[0]
    return TUnion(tuple(out))


def _merge_objects(a: TObject, b: TObject) -> TObject:
    left, right = a.field_map(), b.field_map()
    fields = []
    for name in sorted(set(left) | set(right)):
        fa, fb = left.get(name), right.get(name)
        if fa is not None and fb is not None:
            fields.append((name, FieldType(unify(fa.type, fb.type), fa.required and fb.required)))
        else:
            present = fa if fa is not None else fb
            assert present is not None
            fields.append((name, FieldType(present.type, False)))
    return TObject(tuple(fields))


def fold_examples(docs: list[Any]) -> InferredType:
    """Raw lattice fold over documents; bottom seeds may remain inside."""
    result: InferredType = BOTTOM
    for doc in docs:
        result = unify(result, _infer_raw(doc))
    return result


def _infer_raw(value: Any) -> InferredType:
    if value is None:
        return T_NULL
    if isinstance(value, bool):
        return T_BOOL
    if isinstance(value, int):
        return T_INT
    if isinstance(value, float):
        return T_FLOAT
    if isinstance(value, str):
        return T_STRING
    if isinstance(value, list):
        elem: InferredType = BOTTOM
        for item in value:
            elem = unify(elem, _infer_raw(item))
        return TArray(elem)
    if isinstance(value, dict):
        fields = tuple((name, FieldType(_infer_raw(item), True)) for name, item in value.items())
        return TObject(fields)
    raise TypeError(f"not a JSON value: {value!r}")


def finalize(t: InferredType) -> InferredType:
    """Publishable form of a type: any leftover bottom seed widens to any."""
    if t == BOTTOM:
        return T_ANY
    if isinstance(t, TArray):
        return TArray(finalize(t.elem))
    if isinstance(t, TObject):
        return TObject(
            tuple((n, FieldType(finalize(f.type), f.required)) for n, f in t.fields)
        )
    if isinstance(t, TUnion):
        return TUnion(tuple(finalize(b) for b in t.branches))
    return t


def infer_value_type(value: Any) -> InferredType:
    """Type of a single JSON document."""
    return finalize(_infer_raw(value))


def infer_from_examples(docs: list[Any]) -> InferredType:
    """Join of all per-document types; the unconstrained type when docs is empty.

    Callers tag W_NO_EXAMPLE themselves when passing an empty list. The fold
    runs on raw (bottom-seeded) types so that a population of examples like
    ``[[], [1]]`` still infers the tight element type; only the final result
    is published.
    """
    return finalize(fold_examples(docs))


def inhabits(value: Any, t: InferredType) -> bool:
    """Membership check, implemented structurally and independently of unify.

    Objects are closed-world: a document with a key the type does not
    declare is not a member. Integers inhabit the float type (numeric
    widening) but booleans never inhabit numeric types.
    """
    if t == T_ANY:
        return True
    if t == BOTTOM:
        return False
    if t == T_NULL:
        return value is None
    if t == T_BOOL:
        return isinstance(value, bool)
    if t == T_INT:
        return isinstance(value, int) and not isinstance(value, bool)
    if t == T_FLOAT:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if t == T_STRING:
        return isinstance(value, str)
    if isinstance(t, TArray):
        return isinstance(value, list) and all(inhabits(item, t.elem) for item in value)
    if isinstance(t, TObject):
        if not isinstance(value, dict):
            return False
        declared = t.field_map()
        if any(key not in declared for key in value):
            return False
        for name, field in declared.items():
            if name in value:
                if not inhabits(value[name], field.type):
                    return False
            elif field.required:
                return False
        return True
    if isinstance(t, TUnion):
        return any(inhabits(value, b) for b in t.branches)
    raise TypeError(f"cannot check membership of {t!r}")


def empty_array_paths(value: Any, prefix: str = "$") -> list[str]:
    """JSON paths of empty arrays inside a document (element types unknowable)."""
    paths: list[str] = []
    if isinstance(value, list):
        if not value:
            paths.append(prefix)
        for i, item in enumerate(value):
            paths.extend(empty_array_paths(item, f"{prefix}[{i}]"))
    elif isinstance(value, dict):
        for name, item in value.items():
            paths.extend(empty_array_paths(item, f"{prefix}.{name}"))
    return paths


class DeclOrigin(enum.Enum):
    REQUEST = "Request"
    RESPONSE = "Response"
    NESTED = "Nested"


@dataclass(frozen=True)
class TypeDecl:
    """A named object type lifted out of an inferred tree (name pre-mangling)."""

    name: str
    body: TObject
    origin: DeclOrigin
    source_record: RecordId


def lift_declarations(
    t: InferredType,
    base_name: str,
    *,
    origin: DeclOrigin = DeclOrigin.NESTED,
    source_record: RecordId,
) -> tuple[InferredType, list[TypeDecl], list[Issue]]:
    """Replace every object node with a named reference and collect declarations.

    Names grow from ``base_name`` along the field path (array hops add
    ``Item``). Structurally identical bodies share one declaration, which is
    reported as a W_DECL_SHARED issue. Declarations come out children-first.
    """
    decls: list[TypeDecl] = []
    by_body: dict[TObject, str] = {}
    taken: set[str] = set()
    issues: list[Issue] = []

    def add_decl(body: TObject, name: str, decl_origin: DeclOrigin) -> str:
        if body in by_body:
            kept = by_body[body]
            issues.append(
                make_issue(
                    "W_DECL_SHARED",
                    Stage.INFER,
                    f"type {name!r} is structurally identical to {kept!r}; sharing one declaration",
                )
            )
            return kept
        final = name
        suffix = 2
        while final in taken:
            final = f"{name}_{suffix}"
            suffix += 1
        taken.add(final)
        by_body[body] = final
        decls.append(TypeDecl(name=final, body=body, origin=decl_origin, source_record=source_record))
        return final

    def walk(node: InferredType, name_path: str, depth: int) -> InferredType:
        if isinstance(node, TArray):
            return TArray(walk(node.elem, name_path + "Item", depth + 1))
        if isinstance(node, TUnion):
            return TUnion(tuple(walk(b, name_path, depth + 1) for b in node.branches))
        if isinstance(node, TObject):
            lifted = TObject(
                tuple(
                    (n, FieldType(walk(f.type, name_path + _cap(n), depth + 1), f.required))
                    for n, f in node.fields
                )
            )
            decl_origin = origin if depth == 0 else DeclOrigin.NESTED
            return TRef(add_decl(lifted, name_path, decl_origin))
        return node

    return walk(t, base_name, 0), decls, issues


def _cap(name: str) -> str:
    return name[:1].upper() + name[1:] if name else name


_DECLARED_TYPES: dict[str, InferredType] = {
    "string": T_STRING,
    "integer": T_INT,
    "int": T_INT,
    "number": T_FLOAT,
    "boolean": T_BOOL,
    "array": TArray(T_ANY),
    "object": TObject(()),
}


def type_of_parameter(param: Parameter) -> tuple[InferredType, list[Issue]]:
    """Type a documented parameter: its example wins over its declared type."""
    issues: list[Issue] = []
    declared = None
    if param.declared_type is not None:
        declared = _DECLARED_TYPES.get(param.declared_type.strip().lower())

    if param.has_example:
        inferred = infer_value_type(param.example)
        for path in empty_array_paths(param.example):
            issues.append(
                make_issue(
                    "W_EMPTY_ARRAY",
                    Stage.INFER,
                    f"parameter {param.name!r} example has an empty array at {path}",
                    field=param.name,
                )
            )
        if declared is not None and unify(inferred, declared) != declared:
            issues.append(
                make_issue(
                    "W_PARAM_TYPE_CONFLICT",
                    Stage.INFER,
                    f"parameter {param.name!r}: example types as {inferred!r} but docs declare "
                    f"{param.declared_type!r}; the example wins",
                    field=param.name,
                )
            )
        return inferred, issues

    if declared is not None:
        if declared == TObject(()):
            issues.append(
                make_issue(
                    "W_PARAM_TYPE_OPAQUE",
                    Stage.INFER,
                    f"parameter {param.name!r} is declared an object with unknown fields",
                    field=param.name,
                )
            )
        return declared, issues

    issues.append(
        make_issue(
            "W_PARAM_TYPE_DEFAULTED",
            Stage.INFER,
            f"parameter {param.name!r} has no example and no recognized declared type; "
            "defaulting to string",
            field=param.name,
        )
    )
    return T_STRING, issues
