"""Detector backends: remote chat completion, canned replay, lexical baseline.

Every backend exposes the same surface: given the prompt for one call it
returns raw response text.  The lexical baseline synthesizes a response in
the standard JSON contract so its transcripts go through the exact same
parsing path as a real model's.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Sequence

import httpx

from ..corpus import Document
from ..errors import BackendRejected, BackendUnreachable, ReplayMissing
from ..smells import catalog
from .types import BackendProfile, Finding, Severity
from ..smells import SmellId


def lexical_baseline_analyze(doc: Document) -> list[Finding]:
    """Scan one document for the catalog's lexical signature phrases.

    Each case-insensitive occurrence of a signature yields a medium-severity
    finding whose evidence quote is the exact matched source substring.
    """
    body_lower = doc.body.lower()
    findings: list[Finding] = []
    for definition in catalog():
        for signature in definition.lexical_signatures:
            needle = signature.lower()
            pos = body_lower.find(needle)
            while pos != -1:
                quote = doc.body[pos:pos + len(needle)]
                findings.append(Finding(
                    claimed_doc_ref=doc.id,
                    resolved_doc_id=doc.id,
                    smell=definition.id,
                    severity=Severity.MEDIUM,
                    evidence_quote=quote,
                    rationale=f"Matched signature phrase for {definition.canonical_name}.",
                ))
                pos = body_lower.find(needle, pos + len(needle))
    return findings


def _findings_as_contract_json(findings: Sequence[Finding]) -> str:
    payload = []
    for f in findings:
        smell_name = ""
        if isinstance(f.smell, SmellId):
            for d in catalog():
                if d.id == f.smell:
                    smell_name = d.canonical_name
                    break
        payload.append({
            "doc": f.resolved_doc_id or f.claimed_doc_ref,
            "smell": smell_name or f.raw_label,
            "severity": f.severity.value,
            "evidence": f.evidence_quote,
            "rationale": f.rationale,
            "recommendation": f.recommendation,
        })
    return json.dumps(payload, indent=1)


class LexicalBaselineBackend:
    def __init__(self, profile: BackendProfile):
        self.profile = profile

    def complete(self, call_index: int, call_docs: Sequence[Document], system: str, user: str) -> str:
        findings: list[Finding] = []
        for doc in call_docs:
            findings.extend(lexical_baseline_analyze(doc))
        return _findings_as_contract_json(findings)


class ReplayBackend:
    """Replays canned responses from a directory of <call_index>.txt files."""

    def __init__(self, profile: BackendProfile):
        self.profile = profile
        self.directory = Path(profile.replay_dir or "")

    def complete(self, call_index: int, call_docs: Sequence[Document], system: str, user: str) -> str:
        path = self.directory / f"{call_index}.txt"
        if not path.exists():
            raise ReplayMissing(f"no canned response at {path}")
        return path.read_text(encoding="utf-8")


class RemoteChatBackend:
    """POSTs a chat-completion request and returns the first choice's content."""

    def __init__(self, profile: BackendProfile, transport: httpx.BaseTransport | None = None):
        self.profile = profile
        self._transport = transport

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.profile.auth_token_env:
            token = os.environ.get(self.profile.auth_token_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, call_index: int, call_docs: Sequence[Document], system: str, user: str,
                 temperature: float = 0.0, seed: int | None = None) -> str:
        payload: dict = {
            "model": self.profile.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": temperature,
        }
        if seed is not None:
            payload["seed"] = seed
        try:
            with httpx.Client(transport=self._transport, timeout=self.profile.timeout_seconds) as client:
                response = client.post(self.profile.endpoint, json=payload, headers=self._headers())
        except httpx.HTTPError as exc:
            raise BackendUnreachable(f"{self.profile.endpoint}: {exc}") from exc
        if response.status_code < 200 or response.status_code >= 300:
            raise BackendRejected(
                f"backend returned HTTP {response.status_code}",
                status_code=response.status_code,
                body=response.text[:2000],
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendRejected(
                "backend response is not chat-completion shaped",
                status_code=response.status_code,
                body=response.text[:2000],
            ) from exc


def make_backend(profile: BackendProfile, transport: httpx.BaseTransport | None = None):
    if profile.kind == "lexical_baseline":
        return LexicalBaselineBackend(profile)
    if profile.kind == "replay":
        return ReplayBackend(profile)
    return RemoteChatBackend(profile, transport=transport)
