"""The local HTTP JSON API the browser playground consumes."""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import llm
from .catalog import export_catalog
from .corpus import RuleCorpus, load_corpus
from .dsl import load_rule_documents, serialize_rule
from .engine import Environment, fix_one, run_rules
from .report import Report
from .version import VERSION


def _error(status: int, code: str, message: str, **extra: Any) -> JSONResponse:
    return JSONResponse(
        {"error": {"code": code, "message": message, **extra}}, status_code=status
    )


async def _json_body(request: Request) -> Optional[dict]:
    try:
        data = await request.json()
    except Exception:
        return None
    return data if isinstance(data, dict) else None


def create_app(
    corpus: Optional[RuleCorpus] = None,
    env: Optional[Environment] = None,
    corpus_errors: Optional[list[str]] = None,
) -> FastAPI:
    if corpus is None:
        corpus, loaded_errors = load_corpus()
        corpus_errors = (corpus_errors or []) + loaded_errors
    env = env or Environment()
    corpus_errors = corpus_errors or []

    app = FastAPI(title="pipeline linter API", version=VERSION)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/api/lint")
    async def lint(request: Request) -> JSONResponse:
        body = await _json_body(request)
        if body is None or not isinstance(body.get("markdown"), str):
            return _error(400, "bad_request", "body must be JSON with a string 'markdown'")
        markdown = body["markdown"]
        preset_name = body.get("preset")
        rule_sel = body.get("rules")
        if preset_name and rule_sel:
            return _error(400, "bad_request", "pass either 'preset' or 'rules', not both")

        errors = list(corpus_errors)
        if preset_name is not None:
            if not isinstance(preset_name, str):
                return _error(400, "bad_request", "'preset' must be a string")
            preset = corpus.presets.get(preset_name)
            if preset is None:
                available = ", ".join(sorted(corpus.presets)) or "(none)"
                return _error(
                    400,
                    "unknown_preset",
                    f"unknown preset {preset_name!r}; available presets: {available}",
                )
            selected, missing = corpus.resolve(preset)
            errors.extend(
                f"preset {preset_name!r} names unknown rule {name!r}" for name in missing
            )
        elif rule_sel is not None:
            if isinstance(rule_sel, str):
                names = [n.strip() for n in rule_sel.split(",") if n.strip()]
            elif isinstance(rule_sel, list) and all(isinstance(n, str) for n in rule_sel):
                names = list(rule_sel)
            else:
                return _error(
                    400,
                    "bad_request",
                    "'rules' must be a list of names or a comma-separated string",
                )
            selected = []
            for name in names:
                rule = corpus.rules.get(name)
                if rule is None:
                    errors.append(f"unknown rule {name!r}")
                else:
                    selected.append(rule)
        else:
            selected = list(corpus.rules.values())

        global_ignores = body.get("globalIgnores") or []
        if not (
            isinstance(global_ignores, list)
            and all(isinstance(n, str) for n in global_ignores)
        ):
            return _error(400, "bad_request", "'globalIgnores' must be a list of rule names")

        results = run_rules(markdown, selected, env, global_ignores=global_ignores)
        document_path = body.get("documentPath")
        report = Report(
            document_path if isinstance(document_path, str) else "(document)",
            results,
            config_errors=errors,
        )
        return JSONResponse(report.to_dict())

    @app.post("/api/rules/generate")
    async def generate(request: Request) -> JSONResponse:
        body = await _json_body(request)
        if body is None or not isinstance(body.get("idea"), str) or not body["idea"].strip():
            return _error(400, "bad_request", "body must be JSON with a non-empty 'idea'")
        model = body.get("model")
        try:
            text = llm.generate_rule(
                body["idea"], env.provider, model=model if isinstance(model, str) else None
            )
        except llm.GenerationError as exc:
            return _error(
                422,
                "generation_failed",
                "the generated rule failed validation",
                rawResponse=exc.raw_response,
                violations=[
                    {"path": v.path, "message": v.message} for v in exc.violations
                ],
            )
        except llm.ProviderError as exc:
            return _error(502, "provider_error", str(exc))
        return JSONResponse({"yaml": text})

    @app.post("/api/rules/validate")
    async def validate(request: Request) -> JSONResponse:
        body = await _json_body(request)
        if body is None or not isinstance(body.get("yaml"), str):
            return _error(400, "bad_request", "body must be JSON with a string 'yaml'")
        rules, violations = load_rule_documents(body["yaml"])
        ok = bool(rules) and not any(v.level == "error" for v in violations)
        payload: dict[str, Any] = {
            "ok": ok,
            "violations": [
                {"path": v.path, "message": v.message, "level": v.level}
                for v in violations
            ],
        }
        if ok:
            payload["rules"] = [r.name for r in rules]
            payload["normalized"] = [serialize_rule(r) for r in rules]
        return JSONResponse(payload)

    @app.post("/api/fix")
    async def fix(request: Request) -> JSONResponse:
        body = await _json_body(request)
        if body is None or not isinstance(body.get("markdown"), str):
            return _error(400, "bad_request", "body must be JSON with a string 'markdown'")
        rule_name = body.get("ruleName")
        if not isinstance(rule_name, str):
            return _error(400, "bad_request", "'ruleName' must be a string")
        raw_id = body.get("diagnosticId")
        if isinstance(raw_id, int) and not isinstance(raw_id, bool):
            index = raw_id
        elif isinstance(raw_id, str) and raw_id.rsplit(":", 1)[-1].isdigit():
            index = int(raw_id.rsplit(":", 1)[-1])
        else:
            return _error(
                400, "bad_request", "'diagnosticId' must be an integer or 'ruleName:index'"
            )
        rule = corpus.rules.get(rule_name)
        if rule is None:
            return _error(404, "unknown_rule", f"unknown rule {rule_name!r}")
        try:
            fixed, diag = fix_one(body["markdown"], rule, index, env)
        except ValueError as exc:
            return _error(400, "not_fixable", str(exc))
        except llm.FixFormatError as exc:
            return _error(502, "fix_format", str(exc))
        except llm.ProviderError as exc:
            return _error(502, "provider_error", str(exc))
        return JSONResponse(
            {
                "fixedMarkdown": fixed,
                "diagnostic": diag.to_dict(),
                "ruleName": rule.name,
                "diagnosticId": f"{rule.name}:{index}",
            }
        )

    @app.get("/api/presets")
    async def presets() -> JSONResponse:
        return JSONResponse(
            {
                "presets": [
                    {
                        "name": preset.name,
                        "description": preset.description,
                        "rules": list(preset.rule_names),
                    }
                    for _, preset in sorted(corpus.presets.items())
                ]
            }
        )

    @app.get("/api/rules")
    async def rules() -> JSONResponse:
        return JSONResponse(
            {
                "rules": [
                    {
                        "name": rule.name,
                        "description": rule.description,
                        "severity": rule.severity,
                        "fixable": any(
                            step.operator_id == "fixUsingLLM" for step in rule.pipeline
                        ),
                        "yaml": serialize_rule(rule),
                    }
                    for _, rule in sorted(corpus.rules.items())
                ]
            }
        )

    @app.get("/api/operators")
    async def operators() -> JSONResponse:
        return JSONResponse(export_catalog())

    return app
