"""Exception types shared across the workbench."""

from __future__ import annotations


class EasmellError(Exception):
    """Base class for all operational errors raised by this package."""


# --- corpus ---------------------------------------------------------------

class UnsupportedFormat(EasmellError):
    pass


class ExtractionEmpty(EasmellError):
    pass


class MalformedContainer(EasmellError):
    pass


class ExtractorUnavailable(EasmellError):
    pass


class InvalidChunkConfig(EasmellError):
    pass


class CorpusEmpty(EasmellError):
    pass


class DanglingAnnotation(EasmellError):
    pass


class DuplicateDocumentId(EasmellError):
    pass


# --- smells ----------------------------------------------------------------

class EmptyLabel(EasmellError):
    pass


# --- detection -------------------------------------------------------------

class ContextBudgetExceeded(EasmellError):
    def __init__(self, doc_id: str, message: str | None = None):
        super().__init__(message or f"document {doc_id!r} does not fit the context budget")
        self.doc_id = doc_id


class BackendUnreachable(EasmellError):
    pass


class BackendRejected(EasmellError):
    def __init__(self, message: str, status_code: int | None = None, body: str | None = None):
        super().__init__(message)
        self.status_code = status_code
        self.body = body


class ReplayMissing(EasmellError):
    pass


# --- evaluation ------------------------------------------------------------

class MissingGroundTruth(EasmellError):
    def __init__(self, doc_id: str):
        super().__init__(f"no ground truth entry for document {doc_id!r}")
        self.doc_id = doc_id


class EmptyConfusion(EasmellError):
    pass


class InsufficientRuns(EasmellError):
    pass


# --- review / reporting ----------------------------------------------------

class UnknownFinding(EasmellError):
    pass


class UnknownRun(EasmellError):
    pass


class UnknownDocument(EasmellError):
    pass


class EmptyContext(EasmellError):
    pass


# --- service ---------------------------------------------------------------

class DataDirUnavailable(EasmellError):
    pass
