"""Record API responses for the playground test suite.

Runs the linter API in stub mode (no network, no live model) and captures
the exact JSON bodies the browser client would receive. Re-run after any
server-side contract change:

    python3 scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from pipelint.corpus import load_corpus
from pipelint.engine import Environment
from pipelint.llm import FIX_MARKER, Provider, ProviderConfig
from pipelint.server import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

DOCUMENT = """# demo library

A tiny demonstration library.{trailing}

🎉 🎉 🎉 🎉 🎉

## Install

```
pip install demo
```

## Usage

- first item
* second item

See [the contributing guide](#contributing) for details.
""".format(trailing="   ")


def strip_trailing(markdown: str) -> str:
    return "\n".join(line.rstrip(" \t") for line in markdown.split("\n"))


def build_client() -> TestClient:
    corpus, errors = load_corpus()
    assert not errors, errors
    provider = Provider(ProviderConfig(mode="stub"))
    # the default stub fix echoes the document; this matcher makes the
    # recorded fix genuinely remove the trailing whitespace instead
    provider.stub.add(
        FIX_MARKER + "\n" + strip_trailing(DOCUMENT),
        when=lambda system, user: system.startswith("You are a Markdown linter.")
        and "no-trailing-whitespace" in system,
    )
    # a generation attempt whose idea mentions "gibberish" yields output the
    # validator rejects, so the 422 error body can be recorded too
    provider.stub.add(
        "this is not yaml at all",
        when=lambda system, user: system.startswith(
            "You are a README linter rule designer."
        )
        and "gibberish" in user,
    )
    env = Environment(provider=provider)
    return TestClient(create_app(corpus, env=env))


def dump(name: str, payload: object) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    client = build_client()

    (FIXTURES / "document.md").write_text(DOCUMENT)
    print("wrote tests/fixtures/document.md")

    lint = client.post(
        "/api/lint",
        json={
            "markdown": DOCUMENT,
            "preset": "software-library",
            "documentPath": "playground.md",
        },
    )
    assert lint.status_code == 200, lint.text
    dump("lint-software-library.json", lint.json())

    fix = client.post(
        "/api/fix",
        json={
            "markdown": DOCUMENT,
            "ruleName": "no-trailing-whitespace",
            "diagnosticId": "no-trailing-whitespace:0",
        },
    )
    assert fix.status_code == 200, fix.text
    assert fix.json()["fixedMarkdown"] == strip_trailing(DOCUMENT)
    dump("fix-trailing-whitespace.json", fix.json())

    operators = client.get("/api/operators")
    assert operators.status_code == 200
    dump("operators.json", operators.json())

    presets = client.get("/api/presets")
    assert presets.status_code == 200
    dump("presets.json", presets.json())

    rules = client.get("/api/rules")
    assert rules.status_code == 200
    dump("rules.json", rules.json())

    generated = client.post(
        "/api/rules/generate", json={"idea": "require at least two headings"}
    )
    assert generated.status_code == 200, generated.text
    dump("generate-rule.json", generated.json())

    rejected = client.post("/api/rules/generate", json={"idea": "gibberish"})
    assert rejected.status_code == 422, rejected.text
    dump("error-generation-failed.json", rejected.json())

    missing = client.post(
        "/api/fix",
        json={"markdown": DOCUMENT, "ruleName": "no-such-rule", "diagnosticId": 0},
    )
    assert missing.status_code == 404
    dump("error-unknown-rule.json", missing.json())

    invalid = client.post(
        "/api/rules/validate",
        json={"yaml": "rule: broken\npipeline:\n  - operator: nonsense\n"},
    )
    assert invalid.status_code == 200
    assert invalid.json()["ok"] is False
    dump("validate-bad.json", invalid.json())

    summary = lint.json()["summary"]
    total = summary["errors"] + summary["warnings"]
    print(f"lint fixture carries {total} diagnostics")
    assert total >= 3, "fixture document should trip several rules"


if __name__ == "__main__":
    main()
