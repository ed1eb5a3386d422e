"""Prompt assembly for detection calls.

One shared template drives every backend: the system text carries the smell
catalog and the output contract, the user text carries the documents wrapped
in unambiguous delimiters so quotes and doc references can be traced back.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from ..corpus import Document
from ..errors import ContextBudgetExceeded
from ..smells import catalog
from .types import DetectionProtocol

DOC_OPEN = "<<<DOC id={doc_id} title={title}>>>"
DOC_CLOSE = "<<<END DOC>>>"
ADDENDUM_OPEN = "<<<ADDENDUM>>>"
ADDENDUM_CLOSE = "<<<END ADDENDUM>>>"

DEFAULT_MAX_CALL_CHARS = 400_000

_SYSTEM_TEMPLATE = """\
You are an enterprise architecture analyst reviewing business documents for \
architecture smells. The closed catalog of smells you may report is:

{catalog_block}

Read the documents between the delimiters. Report only highly evident cases; \
if a document shows none of the listed smells, report nothing for it. Never \
invent smells that are not in the catalog.

Respond with a JSON array and nothing else. One element per finding:
[{{"doc": "<document id>", "smell": "<catalog name>", "severity": "low|medium|high", \
"evidence": "<verbatim quote from the document>", "rationale": "<why this is the smell>", \
"recommendation": "<how to address it>"}}]

The evidence field must quote the document text verbatim, without paraphrasing, \
so the quote can be located in the source. Use the document id exactly as given \
in the delimiter. An empty array [] means no findings.
"""


@dataclass(frozen=True)
class PromptConfig:
    max_call_chars: int = DEFAULT_MAX_CALL_CHARS
    corrective_context: str | None = None


@dataclass(frozen=True)
class PromptCall:
    call_index: int
    doc_ids: tuple[str, ...]
    user_text: str


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    prompt_version: str
    calls: tuple[PromptCall, ...]


def system_text() -> str:
    block = "\n".join(
        f"{i + 1}. {d.canonical_name}: {d.description}" for i, d in enumerate(catalog())
    )
    return _SYSTEM_TEMPLATE.format(catalog_block=block)


def prompt_version() -> str:
    """Short content hash of the rendered system template."""
    return hashlib.sha256(system_text().encode("utf-8")).hexdigest()[:12]


def render_doc_block(doc: Document) -> str:
    header = DOC_OPEN.format(doc_id=doc.id, title=doc.title)
    return f"{header}\n{doc.body}\n{DOC_CLOSE}"


def assemble_prompt(
    documents: Sequence[Document],
    protocol: DetectionProtocol,
    config: PromptConfig | None = None,
) -> PromptBundle:
    """Group documents into calls and render the user text for each call.

    Raises ContextBudgetExceeded naming the first document whose block pushes
    a call past the configured character budget.
    """
    config = config or PromptConfig()
    system = system_text()
    calls: list[PromptCall] = []
    addendum = ""
    if config.corrective_context:
        addendum = f"\n\n{ADDENDUM_OPEN}\n{config.corrective_context.strip()}\n{ADDENDUM_CLOSE}"
    for index, group in enumerate(protocol.group(documents)):
        blocks: list[str] = []
        used = len(addendum)
        for doc in group:
            block = render_doc_block(doc)
            used += len(block) + 2
            if used > config.max_call_chars:
                raise ContextBudgetExceeded(doc.id)
            blocks.append(block)
        user_text = "\n\n".join(blocks) + addendum
        calls.append(PromptCall(call_index=index, doc_ids=tuple(d.id for d in group), user_text=user_text))
    return PromptBundle(system_text=system, prompt_version=prompt_version(), calls=tuple(calls))
