"""Operators that talk to the outside world: link checks and repo fetches."""

from __future__ import annotations

import base64
import fnmatch
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional

import requests

from ..dsl import OperatorStep
from ..mdcore import SourceSpan
from ..values import PipelineValue
from .base import OfflineSkip, OperatorError, register

_REPO_RE = re.compile(r"[A-Za-z0-9_.\-]+/[A-Za-z0-9_.\-]+")
_USER_AGENT = {"User-Agent": "pipelint-link-check"}


def _check_url(url: str, timeout_s: float, allowed: set[int]) -> Optional[str]:
    """None when the link is fine, else the reason it is not."""
    try:
        response = requests.get(
            url, timeout=timeout_s, allow_redirects=False, headers=_USER_AGENT
        )
    except requests.Timeout:
        return f"timed out after {int(timeout_s * 1000)} ms"
    except requests.RequestException as exc:
        reason = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        return f"is unreachable: {reason[:120]}"
    if response.status_code not in allowed:
        return f"returned status {response.status_code}"
    return None


@register("isLinkAlive")
def is_link_alive_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if not ctx.env.allow_network:
        raise OfflineSkip("link checking needs network access (--allow-net)")
    timeout_s = int(step.get("timeout")) / 1000.0
    allowed = {int(c) for c in step.get("allowed_status_codes")}

    occurrences: list[tuple[str, SourceSpan]] = []
    for node in ctx.ast.walk():
        if node.kind in ("link", "image"):
            url = str(node.attrs.get("url", ""))
            if url.startswith(("http://", "https://")):
                occurrences.append((url, node.span))
    unique = sorted({url for url, _ in occurrences})
    if not unique:
        ctx.record([])
        return PipelineValue.diagnostics([])

    with ThreadPoolExecutor(max_workers=min(8, len(unique))) as pool:
        problems = dict(
            zip(unique, pool.map(lambda u: _check_url(u, timeout_s, allowed), unique))
        )

    diags = []
    for url, span in sorted(occurrences, key=lambda pair: (pair[1], pair[0])):
        problem = problems[url]
        if problem is not None:
            diags.append(ctx.diagnostic(f"link {url} {problem}", span))
    ctx.record(diags)
    return PipelineValue.diagnostics(diags)


def _github_get(ctx: Any, path: str, timeout_s: float = 10.0) -> Any:
    url = ctx.env.github_base_url.rstrip("/") + path
    headers = {"Accept": "application/vnd.github+json", **_USER_AGENT}
    try:
        response = requests.get(url, timeout=timeout_s, headers=headers)
    except requests.RequestException as exc:
        raise OperatorError(f"repository API request failed: {exc}", retriable=True) from exc
    if response.status_code == 404:
        raise OperatorError(f"repository API returned 404 for {path}")
    if response.status_code == 403:
        raise OperatorError("repository API refused the request (rate limit?)", retriable=True)
    if response.status_code != 200:
        raise OperatorError(f"repository API returned status {response.status_code} for {path}")
    try:
        return response.json()
    except ValueError as exc:
        raise OperatorError("repository API returned a non-JSON body") from exc


@register("fetchFromGithub")
def fetch_from_github_op(ctx: Any, step: OperatorStep, value: PipelineValue) -> PipelineValue:
    if not ctx.env.allow_network:
        raise OfflineSkip("repository fetches need network access (--allow-net)")
    repo = str(step.get("repo"))
    if not _REPO_RE.fullmatch(repo):
        raise OperatorError(f"repo must look like owner/name, got {repo!r}")
    branch = str(step.get("branch"))
    file_name = str(step.get("fileName"))
    fetch_type = step.get("fetchType")

    if fetch_type == "content":
        data = _github_get(ctx, f"/repos/{repo}/contents/{file_name}?ref={branch}")
        if not isinstance(data, dict) or "content" not in data:
            raise OperatorError(f"no file content in response for {file_name}")
        text = base64.b64decode(data["content"]).decode("utf-8", errors="replace")
        return PipelineValue.opaque(text)

    if fetch_type == "paths":
        data = _github_get(ctx, f"/repos/{repo}/git/trees/{branch}?recursive=1")
        tree = data.get("tree", []) if isinstance(data, dict) else []
        paths = [
            entry["path"]
            for entry in tree
            if entry.get("type") == "blob" and fnmatch.fnmatch(entry.get("path", ""), file_name)
        ]
        return PipelineValue.opaque(paths)

    data = _github_get(ctx, f"/repos/{repo}")
    if step.get("useCustomMetaPath"):
        target: Any = data
        meta_path = str(step.get("metaPath"))
        for key in [k for k in meta_path.split(".") if k]:
            if not isinstance(target, dict) or key not in target:
                raise OperatorError(f"metaPath {meta_path!r} is missing key {key!r}")
            target = target[key]
        return PipelineValue.opaque(target)
    return PipelineValue.opaque(data)
