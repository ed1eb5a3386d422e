"""Closed catalog of business-layer architecture smells and label resolution.

The catalog is fixed: twelve smells, each with a canonical name, a one-line
description, known alias spellings, and a set of lexical signature phrases
used by the lexical baseline detector.  Model output labels are mapped back
onto the catalog with `resolve_label`, which tolerates small spelling
variations but refuses to invent smells that do not exist.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from difflib import SequenceMatcher
from enum import Enum

from .errors import EmptyLabel


class SmellId(str, Enum):
    AMBIGUOUS_VIEWPOINT = "ambiguous_viewpoint"
    BIG_BANG = "big_bang"
    BUSINESS_PROCESS_FOREVER = "business_process_forever"
    CONTRADICTION_IN_INPUT = "contradiction_in_input"
    DEFICIENT_NAMES = "deficient_names"
    EFFICIENCY_GOALS_NOT_VISIBLE = "efficiency_goals_not_visible"
    LACK_OF_DOCUMENTATION = "lack_of_documentation"
    LANGUAGE_DEFICIT = "language_deficit"
    PROJECT_GOALS_NOT_ACHIEVED = "project_goals_not_achieved"
    RESPONSIBILITIES_NOT_DEFINED = "responsibilities_not_defined"
    SHINY_NICKEL = "shiny_nickel"
    TEMPORARY_SOLUTION = "temporary_solution"


@dataclass(frozen=True)
class SmellDefinition:
    id: SmellId
    canonical_name: str
    description: str
    aliases: tuple[str, ...] = ()
    lexical_signatures: tuple[str, ...] = ()


@dataclass(frozen=True)
class Unresolved:
    """A label that could not be mapped onto the catalog; keeps the raw text."""

    raw: str


_CATALOG: tuple[SmellDefinition, ...] = (
    SmellDefinition(
        id=SmellId.AMBIGUOUS_VIEWPOINT,
        canonical_name="Ambiguous Viewpoint",
        description="Viewpoints are mixed or unclear.",
        aliases=("Ambigious Viewpoint",),
        lexical_signatures=(
            "mixes strategic and operational viewpoints",
            "unclear which viewpoint",
            "switches between planning and execution perspectives",
        ),
    ),
    SmellDefinition(
        id=SmellId.BIG_BANG,
        canonical_name="Big Bang",
        description="Architecture changed all at once.",
        lexical_signatures=(
            "replaced all systems in one release",
            "switched over in a single cutover weekend",
            "decommissioned the entire legacy landscape at once",
        ),
    ),
    SmellDefinition(
        id=SmellId.BUSINESS_PROCESS_FOREVER,
        canonical_name="Business Process Forever",
        description="Processes kept unchanged despite need.",
        lexical_signatures=(
            "has not been revised since",
            "unchanged for over a decade",
            "no review of the process steps has taken place",
        ),
    ),
    SmellDefinition(
        id=SmellId.CONTRADICTION_IN_INPUT,
        canonical_name="Contradiction in Input",
        description="Inputs or rules contradict each other.",
        lexical_signatures=(
            "contradicts the rule",
            "while another clause requires",
            "conflicting thresholds",
        ),
    ),
    SmellDefinition(
        id=SmellId.DEFICIENT_NAMES,
        canonical_name="Deficient Names",
        description="Names are unclear or misleading.",
        lexical_signatures=(
            "referred to only as",
            "misleading name",
            "label does not describe",
        ),
    ),
    SmellDefinition(
        id=SmellId.EFFICIENCY_GOALS_NOT_VISIBLE,
        canonical_name="Efficiency Goals not Visible",
        description="No measurable performance targets.",
        lexical_signatures=(
            "no measurable targets",
            "without quantified goals",
            "lacks key performance indicators",
        ),
    ),
    SmellDefinition(
        id=SmellId.LACK_OF_DOCUMENTATION,
        canonical_name="Lack of Documentation",
        description="Key documentation missing.",
        lexical_signatures=(
            "no written documentation exists",
            "relies on undocumented steps",
            "described only verbally",
        ),
    ),
    SmellDefinition(
        id=SmellId.LANGUAGE_DEFICIT,
        canonical_name="Language Deficit",
        description="Naming conventions are inconsistent.",
        lexical_signatures=(
            "naming conventions differ",
            "inconsistent terminology",
            "appears under three different names",
        ),
    ),
    SmellDefinition(
        id=SmellId.PROJECT_GOALS_NOT_ACHIEVED,
        canonical_name="Project Goals not Achieved",
        description="Projects fail to meet objectives.",
        lexical_signatures=(
            "less turnover than expected",
            "less throughput than expected",
            "less adoption than expected",
        ),
    ),
    SmellDefinition(
        id=SmellId.RESPONSIBILITIES_NOT_DEFINED,
        canonical_name="Responsibilities not Defined",
        description="No clear ownership assigned.",
        lexical_signatures=(
            "no named process owner",
            "ownership is left unassigned",
            "nobody is accountable for",
        ),
    ),
    SmellDefinition(
        id=SmellId.SHINY_NICKEL,
        canonical_name="Shiny Nickel",
        description="New tech adopted without real need.",
        lexical_signatures=(
            "adopted because it is currently fashionable",
            "no business case for the new platform",
            "trend-driven tooling decision",
        ),
    ),
    SmellDefinition(
        id=SmellId.TEMPORARY_SOLUTION,
        canonical_name="Temporary Solution",
        description="Quick fixes become long-term.",
        lexical_signatures=(
            "as a temporary workaround until",
            "quick fix that has remained in place",
            "interim spreadsheet still drives",
        ),
    ),
)

# Labels that look close to a catalog entry but name a smell that does not
# exist.  These must stay unresolved no matter what the similarity metric
# thinks; "Inefficient Goals Not Visible" is the known offender produced by
# chat models.
_NEGATIVE_ALIASES = frozenset({
    "inefficient goals not visible",
})

SIMILARITY_THRESHOLD = 0.85


def catalog() -> tuple[SmellDefinition, ...]:
    """Return the full smell catalog in its fixed order."""
    return _CATALOG


def definition(smell: SmellId) -> SmellDefinition:
    return _BY_ID[smell]


def catalog_as_dicts() -> list[dict]:
    """JSON-friendly view of the catalog (id, name, description, aliases)."""
    return [
        {
            "id": d.id.value,
            "name": d.canonical_name,
            "description": d.description,
            "aliases": list(d.aliases),
        }
        for d in _CATALOG
    ]


def _squash(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip()).casefold()


def _tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.casefold())


def token_set_similarity(a: str, b: str) -> float:
    """Similarity of two labels as bags of fuzzily-matched tokens.

    Each token of the smaller set is greedily paired with its most similar
    unused token from the other set; the summed pair similarity is then
    normalised by the larger set size, so extra or missing words cost score.
    """
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 0.0
    if len(ta) > len(tb):
        ta, tb = tb, ta
    remaining = list(tb)
    total = 0.0
    for tok in ta:
        best_i, best = -1, 0.0
        for i, other in enumerate(remaining):
            r = 1.0 if tok == other else SequenceMatcher(None, tok, other).ratio()
            if r > best:
                best_i, best = i, r
        if best_i >= 0:
            remaining.pop(best_i)
            total += best
    return total / max(len(ta), len(tb))


def resolve_label(raw: str) -> SmellId | Unresolved:
    """Map a free-form smell label onto the catalog.

    Exact matches on canonical names or aliases (case-insensitive, whitespace
    collapsed) win.  Otherwise the label is compared against the canonical
    names with `token_set_similarity` and accepted above the threshold.
    Anything else, including blocklisted near-misses, stays `Unresolved`
    with the raw text preserved.
    """
    if not raw or not raw.strip():
        raise EmptyLabel("smell label is empty")
    squashed = _squash(raw)
    if squashed in _NEGATIVE_ALIASES:
        return Unresolved(raw)
    exact = _EXACT_LOOKUP.get(squashed)
    if exact is not None:
        return exact
    best_id, best = None, 0.0
    for d in _CATALOG:
        score = token_set_similarity(raw, d.canonical_name)
        if score > best:
            best_id, best = d.id, score
    if best_id is not None and best >= SIMILARITY_THRESHOLD:
        return best_id
    return Unresolved(raw)


def _build_exact_lookup() -> dict[str, SmellId]:
    lookup: dict[str, SmellId] = {}
    for d in _CATALOG:
        lookup[_squash(d.canonical_name)] = d.id
        lookup[_squash(d.id.value.replace("_", " "))] = d.id
        lookup[d.id.value] = d.id
        for alias in d.aliases:
            lookup[_squash(alias)] = d.id
    return lookup


_BY_ID = {d.id: d for d in _CATALOG}
_EXACT_LOOKUP = _build_exact_lookup()
