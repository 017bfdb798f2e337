from __future__ import annotations

import json

import pytest

from apibind.codegen import (
    IdentifierPolicy,
    apply_casing,
    apply_identifier_policy,
    build_reference,
    format_type,
    function_raw_name,
    render_package,
    split_words,
)
from apibind.curl import HttpMethod
from apibind.ingest import load_corpus
from apibind.parse import parse_record
from apibind.pathtemplate import parse_path_template
from apibind.records import ApiCallRecord, RecordId
from apibind.templates import TemplateSet, NEUTRAL_TEMPLATES
from apibind.typeinfer import TArray, TRef, TUnion, T_ANY, T_INT, T_NULL, T_STRING
from apibind.validate import cross_validate, route


def template_of(raw: str):
    template, issues = parse_path_template(raw)
    assert template is not None, issues
    return template


def valid_records(corpus12_path):
    records = [cross_validate(parse_record(r)) for r in load_corpus(corpus12_path)]
    valid, _ = route(records)
    return valid


def make_valid(atom: str, path: str = "/v1/ping", method=HttpMethod.GET, **kwargs):
    rec = ApiCallRecord(
        id=RecordId.single(atom),
        source_url=f"https://docs.example.com/{atom}",
        http_method=method,
        raw_path=path,
        **kwargs,
    )
    return cross_validate(parse_record(rec))


class TestRawNames:
    def test_simple(self):
        assert function_raw_name(HttpMethod.GET, template_of("/v1/ping")) == "get_v1_ping"

    def test_variables_and_dashes(self):
        raw = function_raw_name(HttpMethod.GET, template_of("/users/{user-id}/messages"))
        assert raw == "get_users_user_id_messages"

    def test_root(self):
        assert function_raw_name(HttpMethod.GET, template_of("/")) == "get"


class TestBuildReference:
    def test_ping_example(self):
        ir = build_reference([make_valid("p", response_example='{"ok":true}')])
        (fn,) = ir.functions
        assert fn.raw_name == "get_v1_ping"
        assert fn.response_type == TRef("GetV1PingResponse")
        (decl,) = ir.decls
        assert decl.name == "GetV1PingResponse"
        assert format_type(decl.body) == "{ok: bool}"

    def test_one_function_per_record(self, corpus12_path):
        valid = valid_records(corpus12_path)
        ir = build_reference(valid)
        assert len(ir.functions) == len(valid) == 10
        assert len({fn.raw_name for fn in ir.functions}) == 10

    def test_groups_from_column(self, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        groups = dict(ir.groups)
        assert set(groups) == {"users", "messages", "misc"}
        assert "get_v1_ping" in groups["misc"]

    def test_empty_valid_list(self):
        ir = build_reference([])
        assert ir.functions == () and ir.decls == ()

    def test_missing_response_example_is_any(self):
        ir = build_reference([make_valid("q")])
        (fn,) = ir.functions
        assert fn.response_type == T_ANY
        assert [i.code for _, i in ir.report] == ["W_NO_EXAMPLE"]

    def test_cross_record_structural_sharing(self, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        names = [d.name for d in ir.decls]
        assert len(names) == len(set(names))
        shared = [issue for _, issue in ir.report if issue.code == "W_DECL_SHARED"]
        assert shared, "fixture corpus contains structurally equal types"
        # one address declaration serves every record that embeds an address
        address_decls = [n for n in names if "Address" in n]
        assert len(address_decls) == 1

    def test_duplicate_raw_names_suffixed(self):
        a = make_valid("a", response_example='{"ok":true}')
        b = make_valid("b")
        ir = build_reference([a, b])
        assert [fn.raw_name for fn in ir.functions] == ["get_v1_ping", "get_v1_ping_2"]
        assert any(issue.code == "W_MERGE_CONFLICT" for _, issue in ir.report)

    def test_params_ordered_by_convention(self):
        rec = make_valid(
            "o",
            path="/v1/things/{tid}",
            raw_parameters=json.dumps(
                [
                    {"name": "h", "in": "header"},
                    {"name": "q", "in": "query"},
                    {"name": "tid", "in": "path"},
                ]
            ),
        )
        ir = build_reference([rec])
        (fn,) = ir.functions
        assert [p.name for p, _ in fn.params] == ["tid", "q", "h"]

    def test_unparsed_record_is_callers_error(self):
        bare = ApiCallRecord(
            id=RecordId.single("x"),
            source_url="https://d/x",
            http_method=HttpMethod.GET,
            raw_path="/x",
        )
        with pytest.raises(ValueError):
            build_reference([bare])

    def test_version_is_digest_prefix(self, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        assert ir.package_meta.version == ir.package_meta.corpus_digest[:12]
        again = build_reference(valid_records(corpus12_path))
        assert again.package_meta.corpus_digest == ir.package_meta.corpus_digest


class TestIdentifierPolicy:
    def test_casing_examples(self):
        assert apply_casing("get_users_user_id", "lower-camel") == "getUsersUserId"
        assert apply_casing("get_users_user_id", "upper-camel") == "GetUsersUserId"
        assert apply_casing("GetUsersUserId", "snake") == "get_users_user_id"

    def test_split_words(self):
        assert split_words("GetV1PingResponseUser-id") == ["get", "v1", "ping", "response", "user", "id"]
        assert split_words("a.b/c_d") == ["a", "b", "c", "d"]
        assert split_words("getHTTPUrl") == ["get", "http", "url"]

    def test_reserved_word_suffixed(self):
        ir = build_reference([make_valid("r", path="/type")])
        named = apply_identifier_policy(
            ir, IdentifierPolicy(casing_function="snake", reserved_words=frozenset({"get_type"}))
        )
        assert named.functions[0].name == "get_type_"

    def test_collision_suffixed_first_seen(self):
        # raws differing only in '-' vs '_' mangle identically; the second
        # one seen takes the numeric suffix
        from apibind.codegen import BindingIr

        a = make_valid("a", path="/x")
        ir = build_reference([a])
        (fn,) = ir.functions
        from dataclasses import replace

        doctored = BindingIr(
            functions=(replace(fn, raw_name="get_user-id"), replace(fn, raw_name="get_user_id")),
            decls=ir.decls,
            groups=(("misc", ("get_user-id", "get_user_id")),),
            package_meta=ir.package_meta,
            report=(),
        )
        named = apply_identifier_policy(doctored, IdentifierPolicy())
        assert [fn.name for fn in named.functions] == ["getUserId", "getUserId_2"]

    def test_identifier_grammar(self):
        assert apply_casing("2fa_enable", "lower-camel") == "_2faEnable"
        assert apply_casing("2fa", "upper-camel") == "_2fa"
        ir = build_reference([make_valid("n", path="/2fa/enable")])
        named = apply_identifier_policy(ir, IdentifierPolicy(casing_function="lower-camel"))
        assert named.functions[0].name == "get2faEnable"

    def test_policy_from_json(self, tmp_path):
        policy_file = tmp_path / "policy.json"
        policy_file.write_text(
            json.dumps(
                {
                    "casing_function": "snake",
                    "casing_type": "upper-camel",
                    "casing_field": "lower-camel",
                    "reserved_words": ["def"],
                }
            ),
            encoding="utf-8",
        )
        policy = IdentifierPolicy.from_json_file(policy_file)
        assert policy.casing_function == "snake"
        assert "def" in policy.reserved_words

    def test_unknown_casing_rejected(self):
        with pytest.raises(ValueError):
            IdentifierPolicy(casing_function="kebab")

    def test_name_maps_recorded(self, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        named = apply_identifier_policy(ir, IdentifierPolicy())
        assert named.name_maps["functions"]["get_v1_ping"] == "getV1Ping"
        assert all(raw in named.name_maps["types"] for raw in (d.name for d in ir.decls))


class TestFormatType:
    def test_expressions(self):
        assert format_type(TArray(T_INT)) == "[int]"
        assert format_type(TUnion((T_NULL, T_STRING))) == "null | string"
        assert format_type(TArray(TUnion((T_INT, T_STRING)))) == "[int | string]"
        assert format_type(T_ANY) == "any"

    def test_refs_use_final_names(self):
        assert format_type(TRef("RawName"), {"RawName": "Final"}) == "Final"


class TestRenderPackage:
    def test_single_function_package(self, tmp_path):
        ir = build_reference([make_valid("p", response_example='{"ok":true}')])
        named = apply_identifier_policy(ir, IdentifierPolicy())
        written = render_package(named, TemplateSet.neutral(), tmp_path)
        assert [p.name for p in written] == ["misc.txt", "manifest.txt"]
        module = (tmp_path / "misc.txt").read_text(encoding="utf-8")
        assert "https://docs.example.com/p" in module
        assert "function getV1Ping() -> GetV1PingResponse" in module
        assert "type GetV1PingResponse = {" in module

    def test_deterministic(self, tmp_path, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        named = apply_identifier_policy(ir, IdentifierPolicy())
        first = tmp_path / "one"
        second = tmp_path / "two"
        render_package(named, TemplateSet.neutral(), first)
        render_package(named, TemplateSet.neutral(), second)
        files_a = sorted(p.relative_to(first) for p in first.rglob("*"))
        files_b = sorted(p.relative_to(second) for p in second.rglob("*"))
        assert files_a == files_b
        for rel in files_a:
            assert (first / rel).read_bytes() == (second / rel).read_bytes()

    def test_unknown_placeholder_names_template(self, tmp_path):
        sources = dict(NEUTRAL_TEMPLATES)
        sources["function.tpl"] = "function {{not_a_thing}}\n"
        broken = TemplateSet.from_sources(sources)
        ir = build_reference([make_valid("p")])
        named = apply_identifier_policy(ir, IdentifierPolicy())
        with pytest.raises(Exception) as exc:
            render_package(named, broken, tmp_path)
        assert "function.tpl" in str(exc.value)
        assert "not_a_thing" in str(exc.value)

    def test_empty_ir_renders_manifest_only(self, tmp_path):
        ir = build_reference([])
        named = apply_identifier_policy(ir, IdentifierPolicy())
        written = render_package(named, TemplateSet.neutral(), tmp_path)
        assert [p.name for p in written] == ["manifest.txt"]
        manifest = written[0].read_text(encoding="utf-8")
        assert "functions 0" in manifest

    def test_shared_decl_emitted_once(self, tmp_path, corpus12_path):
        ir = build_reference(valid_records(corpus12_path))
        named = apply_identifier_policy(ir, IdentifierPolicy())
        render_package(named, TemplateSet.neutral(), tmp_path)
        text = "".join(p.read_text(encoding="utf-8") for p in tmp_path.glob("*.txt"))
        for decl in named.decls:
            assert text.count(f"type {decl.name} = ") == 1
