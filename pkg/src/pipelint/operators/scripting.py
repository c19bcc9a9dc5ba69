"""execute and customCode: gated escape hatches into shells and JavaScript."""

from __future__ import annotations

import json
import os
import subprocess
from typing import Any, Optional

from ..dsl import OperatorStep
from ..values import Match, PipelineValue, ValueKind, Verdict, describe_value
from .base import OperatorError, PolicyError, register

_EXEC_ENV_KEYS = ("PATH", "HOME", "LANG", "LC_ALL", "TMPDIR")

_NODE_HARNESS = """
let raw = "";
process.stdin.on("data", (d) => (raw += d));
process.stdin.on("end", () => {
  const send = (obj) => process.stdout.write(JSON.stringify(obj));
  let payload;
  try {
    payload = JSON.parse(raw);
  } catch (e) {
    send({ error: "runtime", message: "bad harness input" });
    return;
  }
  let fn;
  try {
    fn = new Function("input", "markdown", payload.code);
  } catch (e) {
    send({ error: "syntax", message: String((e && e.message) || e) });
    return;
  }
  try {
    const out = fn(payload.input, payload.markdown);
    send({ result: out === undefined ? null : out });
  } catch (e) {
    send({ error: "runtime", message: String((e && e.message) || e) });
  }
});
"""


def _commands(ctx: Any, value: PipelineValue) -> list[Match]:
    if value.kind is ValueKind.EXTRACTION:
        items = value.payload.all_matches()
    else:
        items = [
            Match(str(node.attrs.get("value", "")), node.span, node_kind="inlineCode")
            for node in ctx.ast.walk()
            if node.kind == "inlineCode"
        ]
    out = []
    for item in items:
        command = item.text.strip()
        if command.startswith("$ "):
            command = command[2:].strip()
        if command:
            out.append(Match(command, item.span, node_kind=item.node_kind))
    return out


@register("execute")
def execute_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if not ctx.env.allow_exec:
        raise PolicyError("command execution is disabled; pass --allow-exec to enable it")
    timeout_s = int(step.get("timeout")) / 1000.0
    commands = _commands(ctx, value)
    if not commands:
        ctx.note("no commands found to execute")
        ctx.record([])
        return PipelineValue.diagnostics([])

    env = {key: os.environ[key] for key in _EXEC_ENV_KEYS if key in os.environ}
    diags = []
    for item in commands:
        try:
            proc = subprocess.run(
                item.text,
                shell=True,
                capture_output=True,
                text=True,
                timeout=timeout_s,
                env=env,
                cwd=ctx.env.working_dir,
            )
        except subprocess.TimeoutExpired:
            diags.append(
                ctx.diagnostic(
                    f"command '{item.text}' timed out after {int(timeout_s * 1000)} ms",
                    item.span,
                )
            )
            continue
        if proc.returncode != 0:
            stderr = " ".join(proc.stderr.split())[:160]
            message = f"command '{item.text}' exited with status {proc.returncode}"
            if stderr:
                message += f": {stderr}"
            diags.append(ctx.diagnostic(message, item.span))
    ctx.record(diags)
    return PipelineValue.diagnostics(diags)


def _as_verdict(result: Any) -> Optional[Verdict]:
    if isinstance(result, bool):
        if result:
            return Verdict(status="pass")
        return Verdict(status="fail", issue="custom check returned false")
    if isinstance(result, dict) and isinstance(result.get("pass"), bool):
        lines = [
            int(n)
            for n in result.get("lines", [])
            if isinstance(n, (int, float)) and not isinstance(n, bool) and n >= 1
        ]
        if result["pass"]:
            return Verdict(status="pass", lines=lines)
        issue = str(result.get("message") or "custom check failed")
        return Verdict(status="fail", lines=lines, issue=issue)
    return None


@register("customCode")
def custom_code_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if not ctx.env.allow_scripts:
        raise PolicyError("custom code is disabled; pass --allow-scripts to enable it")
    code = str(step.get("code"))
    payload = {
        "code": code,
        "input": dict(describe_value(value)) | {"markdown": ctx.markdown},
        "markdown": ctx.markdown,
    }
    try:
        proc = subprocess.run(
            ["node", "-e", _NODE_HARNESS],
            input=json.dumps(payload),
            capture_output=True,
            text=True,
            timeout=10,
        )
    except FileNotFoundError as exc:
        raise OperatorError("node runtime not found; customCode needs node on PATH") from exc
    except subprocess.TimeoutExpired as exc:
        raise OperatorError("custom code timed out after 10000 ms") from exc
    if proc.returncode != 0:
        raise OperatorError(
            f"custom code runner exited with status {proc.returncode}: "
            + " ".join(proc.stderr.split())[:160]
        )
    try:
        reply = json.loads(proc.stdout)
    except ValueError as exc:
        raise OperatorError("custom code runner produced no result") from exc
    if "error" in reply:
        raise OperatorError(f"custom code {reply['error']} error: {reply.get('message', '')}")

    verdict = _as_verdict(reply.get("result"))
    if verdict is not None:
        return PipelineValue.verdict(verdict)
    return PipelineValue.opaque(reply.get("result"))
