"""Document ingestion, normalization, and sliding-window chunking.

Every supported input format is reduced to the same normalized body text
(NFC, LF line endings, no trailing whitespace per line) so that character
offsets recorded anywhere downstream stay valid against the stored body.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
import zipfile
from dataclasses import dataclass, field
from io import BytesIO
from pathlib import Path
from typing import Callable
from xml.etree import ElementTree

from .errors import (
    CorpusEmpty,
    DanglingAnnotation,
    DuplicateDocumentId,
    ExtractionEmpty,
    ExtractorUnavailable,
    InvalidChunkConfig,
    MalformedContainer,
    UnsupportedFormat,
)

SUPPORTED_FORMATS = ("txt", "md", "docx", "pdf")

DEFAULT_WINDOW = 3000
DEFAULT_OVERLAP = 300

_WORD_NS = "http://schemas.openxmlformats.org/wordprocessingml/2006/main"


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    source_format: str
    body: str
    paragraph_offsets: tuple[int, ...]
    business_domain: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "source_format": self.source_format,
            "body": self.body,
            "paragraph_offsets": list(self.paragraph_offsets),
            "business_domain": self.business_domain,
        }

    @staticmethod
    def from_dict(data: dict) -> "Document":
        return Document(
            id=data["id"],
            title=data["title"],
            source_format=data["source_format"],
            body=data["body"],
            paragraph_offsets=tuple(data["paragraph_offsets"]),
            business_domain=data.get("business_domain"),
        )


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    index: int
    start: int
    end: int
    text: str


@dataclass
class Corpus:
    documents: list[Document] = field(default_factory=list)
    annotations: list = field(default_factory=list)

    def get(self, doc_id: str) -> Document | None:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        return None


def normalize_text(text: str) -> str:
    """NFC, LF newlines, no trailing whitespace per line, no outer blank lines."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    text = unicodedata.normalize("NFC", text)
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and not lines[0]:
        lines.pop(0)
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def paragraph_offsets(body: str) -> tuple[int, ...]:
    """Start offset of every non-empty line in the body."""
    offsets = []
    pos = 0
    for line in body.split("\n"):
        if line:
            offsets.append(pos)
        pos += len(line) + 1
    return tuple(offsets)


def document_id(body: str, name: str) -> str:
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()[:12]
    stem = re.sub(r"[^A-Za-z0-9_-]+", "_", Path(name).stem).strip("_") or "document"
    return f"{digest}-{stem}"


def make_document(
    body: str,
    name: str,
    source_format: str = "txt",
    title: str | None = None,
    business_domain: str | None = None,
) -> Document:
    """Build a Document from already-extracted text, applying normalization."""
    normalized = normalize_text(body)
    if not normalized:
        raise ExtractionEmpty(f"{name}: extraction produced no printable characters")
    return Document(
        id=document_id(normalized, name),
        title=title if title is not None else Path(name).stem,
        source_format=source_format,
        body=normalized,
        paragraph_offsets=paragraph_offsets(normalized),
        business_domain=business_domain,
    )


# --- format readers ---------------------------------------------------------

# The pdf path is deliberately pluggable: real extraction needs a rendering
# library, but test fixtures and plain-text exports work with a pass-through.
_pdf_extractor: Callable[[bytes], str] | None = None


def set_pdf_extractor(fn: Callable[[bytes], str] | None) -> None:
    global _pdf_extractor
    _pdf_extractor = fn


def passthrough_pdf_extractor(data: bytes) -> str:
    """Extractor for pdf files that are really UTF-8 text underneath."""
    return data.decode("utf-8", errors="replace")


def _read_docx(data: bytes) -> str:
    """Pull paragraph text out of a docx container, one paragraph per line."""
    try:
        with zipfile.ZipFile(BytesIO(data)) as archive:
            xml_bytes = archive.read("word/document.xml")
    except (zipfile.BadZipFile, KeyError) as exc:
        raise MalformedContainer(f"not a readable docx container: {exc}") from exc
    try:
        root = ElementTree.fromstring(xml_bytes)
    except ElementTree.ParseError as exc:
        raise MalformedContainer(f"docx document part is not well-formed XML: {exc}") from exc
    paragraphs = []
    for para in root.iter(f"{{{_WORD_NS}}}p"):
        runs = [node.text or "" for node in para.iter(f"{{{_WORD_NS}}}t")]
        paragraphs.append("".join(runs))
    return "\n".join(paragraphs)


def ingest(data: bytes, source_format: str, name: str) -> Document:
    """Decode raw bytes of one file into a normalized Document.

    The document id combines a content-hash prefix with the sanitized file
    stem, so byte-identical input always produces the same id.
    """
    fmt = source_format.lower().lstrip(".")
    if fmt not in SUPPORTED_FORMATS:
        raise UnsupportedFormat(f"{name}: unsupported format {source_format!r}")
    if fmt in ("txt", "md"):
        text = data.decode("utf-8-sig", errors="replace")
    elif fmt == "docx":
        text = _read_docx(data)
    else:  # pdf
        if _pdf_extractor is None:
            raise ExtractorUnavailable(
                f"{name}: no pdf extractor registered; call set_pdf_extractor() first"
            )
        text = _pdf_extractor(data)
    return make_document(text, name, source_format=fmt)


def ingest_path(path: Path) -> Document:
    return ingest(path.read_bytes(), path.suffix, path.name)


# --- chunking ----------------------------------------------------------------

def chunk_document(doc: Document, window: int = DEFAULT_WINDOW, overlap: int = DEFAULT_OVERLAP) -> list[Chunk]:
    """Split a document body into overlapping windows of at most `window` chars.

    Consecutive chunks advance by (window - overlap); the final chunk is
    clamped to end exactly at len(body) so the whole text is covered without
    a short tail window.
    """
    if window <= 0 or overlap < 0 or overlap >= window:
        raise InvalidChunkConfig(f"window={window} overlap={overlap} is not a valid chunking setup")
    body = doc.body
    n = len(body)
    if n <= window:
        return [Chunk(doc.id, 0, 0, n, body)]
    stride = window - overlap
    chunks: list[Chunk] = []
    start = 0
    index = 0
    while True:
        end = start + window
        if end >= n:
            chunks.append(Chunk(doc.id, index, start, n, body[start:n]))
            break
        chunks.append(Chunk(doc.id, index, start, end, body[start:end]))
        start += stride
        index += 1
    return chunks


# --- corpus loading ----------------------------------------------------------

ANNOTATIONS_FILENAME = "annotations.json"


def load_corpus(directory: str | Path, annotations_path: str | Path | None = None) -> Corpus:
    """Ingest every supported file in a directory and attach annotations.

    Annotation entries must reference existing document ids; an unknown id is
    a hard error so stale annotation files cannot silently skew evaluation.
    """
    from .evaluation import load_annotations

    directory = Path(directory)
    documents: list[Document] = []
    seen: set[str] = set()
    for path in sorted(directory.iterdir()):
        if not path.is_file() or path.name == ANNOTATIONS_FILENAME:
            continue
        if path.suffix.lower().lstrip(".") not in SUPPORTED_FORMATS:
            continue
        doc = ingest_path(path)
        if doc.id in seen:
            raise DuplicateDocumentId(f"document id {doc.id!r} produced twice (while reading {path.name})")
        seen.add(doc.id)
        documents.append(doc)
    if not documents:
        raise CorpusEmpty(f"no supported documents found in {directory}")
    documents.sort(key=lambda d: d.id)

    if annotations_path is None:
        default = directory / ANNOTATIONS_FILENAME
        annotations_path = default if default.exists() else None
    annotations = []
    if annotations_path is not None:
        annotations = load_annotations(annotations_path)
        for entry in annotations:
            if entry.doc_id not in seen:
                raise DanglingAnnotation(f"annotation references unknown document {entry.doc_id!r}")
    return Corpus(documents=documents, annotations=annotations)


def write_corpus(corpus_docs: list[Document], directory: str | Path) -> None:
    """Write document bodies as .txt files (used by the synthetic generator)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for doc in corpus_docs:
        stem = doc.id.split("-", 1)[1] if "-" in doc.id else doc.id
        (directory / f"{stem}.txt").write_text(doc.body, encoding="utf-8")


def dump_documents_json(documents: list[Document]) -> str:
    return json.dumps([d.to_dict() for d in documents], indent=2)
