"""Seeded generation of synthetic business documents with planted smells.

Documents are assembled from per-domain vocabulary and per-kind skeleton
templates; each planted smell inserts exactly one signature sentence whose
character span is recorded as ground truth.  Generation is pure: the same
scenario spec and seed always produce byte-identical output, which is what
makes the generator usable as an oracle for the detection pipeline.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, Document, make_document
from .evaluation import GroundTruth, write_annotations
from .smells import SmellId, catalog

DOMAINS: tuple[str, ...] = (
    "OrderToCash",
    "ProcureToPay",
    "RecordToReport",
    "HireToRetire",
    "ITManagement",
    "CustomerService",
    "Marketing",
    "Logistics",
)

DOC_KINDS: tuple[str, ...] = (
    "process_description",
    "strategy_paper",
    "policy",
    "work_instruction",
)

CASE_CORPUS_SIZE = 30
CLEAN_DOC_COUNT = 10
STRATEGY_PAPER_COUNT = 8

DATASET_PER_SMELL = 80  # half positive, half negative

_VOCAB: dict[str, dict[str, list[str]]] = {
    "OrderToCash": {
        "areas": ["order intake", "invoicing", "credit checking", "dispute handling", "order automation"],
        "systems": ["the ERP billing module", "the order portal", "the dunning engine"],
        "roles": ["the billing team", "the sales back office"],
        "metrics": ["days sales outstanding", "first-pass invoice rate"],
    },
    "ProcureToPay": {
        "areas": ["supplier onboarding", "purchase requisitions", "invoice matching", "payment runs"],
        "systems": ["the procurement suite", "the vendor master", "the e-invoicing gateway"],
        "roles": ["the purchasing desk", "the accounts payable team"],
        "metrics": ["touchless invoice rate", "payment cycle time"],
    },
    "RecordToReport": {
        "areas": ["journal postings", "month-end close", "intercompany reconciliation", "statutory reporting"],
        "systems": ["the general ledger", "the consolidation engine", "the disclosure tool"],
        "roles": ["the group accounting team", "the reporting unit"],
        "metrics": ["close duration", "late adjustment count"],
    },
    "HireToRetire": {
        "areas": ["recruiting", "employee onboarding", "payroll processing", "offboarding"],
        "systems": ["the HR core system", "the applicant portal", "the time tracking service"],
        "roles": ["the HR operations team", "the payroll office"],
        "metrics": ["time to hire", "payroll error rate"],
    },
    "ITManagement": {
        "areas": ["incident handling", "change management", "capacity planning", "access provisioning"],
        "systems": ["the service desk platform", "the configuration database", "the monitoring stack"],
        "roles": ["the operations bridge", "the platform team"],
        "metrics": ["mean time to restore", "change success rate"],
    },
    "CustomerService": {
        "areas": ["complaint handling", "ticket triage", "refund processing", "knowledge management"],
        "systems": ["the contact center suite", "the case tracker", "the self-service portal"],
        "roles": ["the service desk", "the escalation team"],
        "metrics": ["first contact resolution", "average handling time"],
    },
    "Marketing": {
        "areas": ["campaign tracking", "lead scoring", "content approvals", "event planning"],
        "systems": ["the marketing automation stack", "the asset library", "the campaign module"],
        "roles": ["the campaign office", "the brand team"],
        "metrics": ["conversion rate", "cost per lead"],
    },
    "Logistics": {
        "areas": ["inbound scheduling", "warehouse putaway", "carrier selection", "returns processing"],
        "systems": ["the warehouse management system", "the transport planner", "the yard console"],
        "roles": ["the dispatch office", "the warehouse crew"],
        "metrics": ["on-time delivery rate", "dock turnaround time"],
    },
}

# One sentence pool per smell.  Every sentence contains at least one of the
# smell's lexical signature phrases, so the lexical baseline can always find
# what the generator plants.
SENTENCE_POOLS: dict[SmellId, tuple[str, ...]] = {
    SmellId.AMBIGUOUS_VIEWPOINT: (
        "The section on {area} mixes strategic and operational viewpoints without separating them.",
        "Reviewers found it unclear which viewpoint the {metric} figures are meant to serve.",
        "The narrative around {area} switches between planning and execution perspectives mid-paragraph.",
    ),
    SmellId.BIG_BANG: (
        "The {area} program replaced all systems in one release instead of migrating stepwise.",
        "Operations switched over in a single cutover weekend with no fallback plan for {area}.",
        "The team decommissioned the entire legacy landscape at once to cut licence costs in {area}.",
    ),
    SmellId.BUSINESS_PROCESS_FOREVER: (
        "The {area} workflow has not been revised since {year} despite repeated escalations.",
        "Core rules in {area} have stayed unchanged for over a decade.",
        "Although volumes tripled, no review of the process steps has taken place in {area}.",
    ),
    SmellId.CONTRADICTION_IN_INPUT: (
        "Clause 4 on {area} contradicts the rule stated in the intake checklist.",
        "One directive caps {area} spending at 5,000 EUR while another clause requires sign-off only above 20,000 EUR.",
        "Approvals for {area} rely on conflicting thresholds across the regional annexes.",
    ),
    SmellId.DEFICIENT_NAMES: (
        "The subsystem handling {area} is referred to only as TMP-2 in every runbook.",
        "Staff point out the misleading name of the nightly {area} job, which does the opposite of what it suggests.",
        "The label does not describe what the {area} batch actually changes.",
    ),
    SmellId.EFFICIENCY_GOALS_NOT_VISIBLE: (
        "The improvement initiative for {area} states ambitions but no measurable targets.",
        "Gains in {area} are described qualitatively, without quantified goals for {metric}.",
        "The plan for {area} lacks key performance indicators.",
    ),
    SmellId.LACK_OF_DOCUMENTATION: (
        "No written documentation exists for the exception path in {area}.",
        "The {area} handover relies on undocumented steps known to a single engineer.",
        "Escalation paths in {area} are described only verbally during onboarding.",
    ),
    SmellId.LANGUAGE_DEFICIT: (
        "Naming conventions differ between the {area} forms and {system}.",
        "Auditors flagged inconsistent terminology for {area} records across units.",
        "The same {area} entity appears under three different names in the data dictionary.",
    ),
    SmellId.PROJECT_GOALS_NOT_ACHIEVED: (
        "Pilot project in {area_title} showed {pct}% less turnover than expected because of late deployment.",
        "Pilot project in {area_title} showed {pct}% less throughput than expected after go-live.",
        "Pilot project in {area_title} showed {pct}% less adoption than expected and was paused.",
    ),
    SmellId.RESPONSIBILITIES_NOT_DEFINED: (
        "There is no named process owner for the {area} stream.",
        "Ownership is left unassigned for corrections made in {system}.",
        "Nobody is accountable for stalled tickets raised against {area}.",
    ),
    SmellId.SHINY_NICKEL: (
        "A graph database was adopted because it is currently fashionable in the trade press, not because {area} needs one.",
        "There is no business case for the new platform beyond vendor enthusiasm around {area}.",
        "Team leads describe the {area} rollout as a trend-driven tooling decision.",
    ),
    SmellId.TEMPORARY_SOLUTION: (
        "Records for {area} are matched by hand as a temporary workaround until the interface is fixed.",
        "The {area} import job is a quick fix that has remained in place for three years.",
        "An interim spreadsheet still drives the weekly {area} allocations.",
    ),
}

_SKELETONS: dict[str, tuple[tuple[str, ...], ...]] = {
    "process_description": (
        (
            "Purpose: this document describes how {area} is handled within {domain_label}. "
            "It applies to all regional units and to {role}.",
            "The process starts when a request reaches {system}. {role_cap} validates the entry, "
            "records the outcome, and forwards approved items to {area2}. Rejected items go back "
            "to the requester with a short justification.",
            "Weekly volumes are tracked in {system2}, and {metric} is reported to the steering "
            "group each month. Exceptions are collected in a shared tray and cleared every Friday.",
            "Handover to {area2} happens once all checks are complete. The receiving team confirms "
            "completeness and schedules the follow-up activities.",
        ),
        (
            "Scope and intent. The steps below cover {area} from first registration through "
            "closure, including the interfaces to {area2}.",
            "Step one: intake. New items arrive through {system} and are classified by {role}. "
            "Step two: processing. Classified items are enriched, checked against the master data, "
            "and booked. Step three: closure. Results are confirmed and archived.",
            "Operational notes. Peak load occurs at quarter end; {metric} is the figure the unit "
            "is judged on. Questions go to the duty coordinator.",
        ),
    ),
    "strategy_paper": (
        (
            "Strategic outlook for {domain_label}. Over the next planning horizon the organisation "
            "intends to consolidate {area} and to modernise {system}.",
            "Initiative one strengthens {area}. Initiative two extends {area2} coverage across all "
            "regions. Initiative three renews the platform underneath {system2}.",
            "The roadmap foresees two waves. Wave one prepares the data foundation and aligns "
            "{role}. Wave two scales the new capabilities and retires what they replace.",
            "Funding follows the annual investment cycle, with a review gate after each wave.",
        ),
        (
            "Vision. {domain_label_cap} should operate as one connected capability, with {area} "
            "and {area2} sharing a common backbone.",
            "Current position. Today {system} carries most of the load, while {metric} varies "
            "strongly between regions.",
            "Direction of travel. Investment concentrates on {area}, followed by a gradual renewal "
            "of the surrounding services. Partnerships cover what the organisation will not build itself.",
        ),
    ),
    "policy": (
        (
            "Policy statement. This policy governs {area} within {domain_label}. It is binding for "
            "all employees and contractors involved.",
            "Rules. Requests must be registered in {system} before any work starts. Approvals "
            "follow the delegation matrix. Records are retained for the mandated period.",
            "Compliance. {role_cap} monitors adherence and reports breaches to the policy board. "
            "Exemptions require written approval in advance.",
        ),
        (
            "Applicability. The provisions below apply to {area} and {area2}, including activities "
            "delegated to external partners.",
            "Obligations. Data entered into {system} must be complete and current. Changes to "
            "reference data follow the four-eyes principle. Thresholds for {metric} are reviewed annually.",
            "Enforcement. Violations are escalated to line management. Repeated violations trigger "
            "a formal review.",
        ),
    ),
    "work_instruction": (
        (
            "Work instruction for {area}. Use this guide when handling standard cases in {system}.",
            "1. Open the work queue and select the oldest item. 2. Verify the entry against the "
            "submitted documents. 3. Record the result and release the item to {area2}. 4. If the "
            "system rejects the entry, correct the data and retry once.",
            "If the retry fails, hand the case to {role} with a short note. Do not close the item yourself.",
        ),
        (
            "Daily routine for {area}. The tasks below are executed every working day before noon.",
            "Check the overnight batch in {system}. Confirm that {metric} is within the agreed "
            "range. Release held items to {area2} and note anything unusual in the shift log.",
            "Escalate to {role} when a blocking error repeats twice. Otherwise file the completed "
            "checklist in the team drive.",
        ),
    ),
}

_TITLES: dict[str, str] = {
    "process_description": "{area_title} Process Description",
    "strategy_paper": "{domain_label_cap} Strategy Paper",
    "policy": "{area_title} Policy",
    "work_instruction": "Work Instruction {area_title}",
}

_CONTEXT_SENTENCES: tuple[str, ...] = (
    "The quarterly review of {area} raised the following point.",
    "An internal audit of {system} noted this observation.",
    "Feedback collected from {role} includes the statement below.",
)

_NEGATIVE_SENTENCES: tuple[str, ...] = (
    "The {area} team completed the scheduled review without open items.",
    "Figures for {metric} stayed within the agreed range throughout the quarter.",
    "Responsibilities for {area} are listed in the current operating handbook.",
    "Documentation for {system} was updated after the last release.",
    "The migration to {system} proceeded in three planned stages.",
)


@dataclass(frozen=True)
class ScenarioSpec:
    scenario_number: int
    domain: str
    doc_kind: str
    planted: tuple[SmellId, ...]
    seed: int


@dataclass(frozen=True)
class TrainingRecord:
    smell: SmellId
    label: bool
    domain: str
    text: str

    def to_json_line(self) -> str:
        return json.dumps({
            "smell": self.smell.value,
            "label": self.label,
            "domain": self.domain,
            "text": self.text,
        })


def _domain_label(domain: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", " ", domain)


def _slots(domain: str, rng: random.Random) -> dict[str, str]:
    vocab = _VOCAB[domain]
    area, area2 = rng.sample(vocab["areas"], 2)
    system, system2 = rng.sample(vocab["systems"], 2)
    role = rng.choice(vocab["roles"])
    metric = rng.choice(vocab["metrics"])
    label = _domain_label(domain)
    return {
        "area": area,
        "area2": area2,
        "area_title": area.title(),
        "system": system,
        "system2": system2,
        "role": role,
        "role_cap": role[0].upper() + role[1:],
        "metric": metric,
        "domain_label": label.lower(),
        "domain_label_cap": label,
        "year": str(rng.choice([2009, 2010, 2011, 2012, 2013])),
        "pct": str(rng.choice([15, 20, 25, 30])),
    }


def signature_sentence(smell: SmellId, slots: dict[str, str], rng: random.Random) -> str:
    return rng.choice(SENTENCE_POOLS[smell]).format(**slots)


def generate_document(spec: ScenarioSpec) -> tuple[Document, GroundTruth]:
    """Build one synthetic document and its ground truth entry.

    Each planted smell contributes exactly one signature sentence, appended
    to a seeded-random paragraph; the recorded span slices back to that
    sentence verbatim.
    """
    rng = random.Random(f"doc:{spec.seed}:{spec.scenario_number}:{spec.domain}:{spec.doc_kind}")
    slots = _slots(spec.domain, rng)
    skeleton = rng.choice(_SKELETONS[spec.doc_kind])
    paragraphs = [p.format(**slots) for p in skeleton]
    title = _TITLES[spec.doc_kind].format(**slots)

    planted_sentences: dict[SmellId, str] = {}
    for smell in spec.planted:
        sentence = signature_sentence(smell, slots, rng)
        target = rng.randrange(len(paragraphs))
        paragraphs[target] = paragraphs[target] + " " + sentence
        planted_sentences[smell] = sentence

    body = "\n\n".join(paragraphs)
    name = f"scenario_{spec.scenario_number:02d}"
    doc = make_document(body, name, source_format="txt", title=title, business_domain=spec.domain)

    spans = {
        smell: (doc.body.index(sentence), doc.body.index(sentence) + len(sentence))
        for smell, sentence in planted_sentences.items()
    }
    truth = GroundTruth(
        doc_id=doc.id,
        scenario_number=spec.scenario_number,
        planted=frozenset(spec.planted),
        evidence_spans=spans or None,
    )
    return doc, truth


def corpus_plan(seed: int) -> list[ScenarioSpec]:
    """Deterministic layout of the 30-document case corpus.

    Ten documents stay clean, eight are strategy papers, every smell is
    planted at least once, and no document carries more than three smells.
    """
    rng = random.Random(f"corpus-plan:{seed}")
    numbers = list(range(1, CASE_CORPUS_SIZE + 1))
    clean = set(rng.sample(numbers, CLEAN_DOC_COUNT))
    strategy = set(rng.sample(numbers, STRATEGY_PAPER_COUNT))

    domain_order = rng.sample(list(DOMAINS), len(DOMAINS))
    other_kinds = [k for k in DOC_KINDS if k != "strategy_paper"]
    kind_order = rng.sample(other_kinds, len(other_kinds))

    smell_order = rng.sample(list(SmellId), len(list(SmellId)))
    smelly_numbers = [n for n in numbers if n not in clean]

    specs = []
    non_strategy_count = 0
    for i, n in enumerate(numbers):
        domain = domain_order[i % len(domain_order)]
        if n in strategy:
            kind = "strategy_paper"
        else:
            kind = kind_order[non_strategy_count % len(kind_order)]
            non_strategy_count += 1

        planted: tuple[SmellId, ...] = ()
        if n not in clean:
            position = smelly_numbers.index(n)
            first = smell_order[position] if position < len(smell_order) else rng.choice(list(SmellId))
            count = rng.choice([1, 1, 2, 2, 3])
            extras = [s for s in rng.sample(list(SmellId), len(list(SmellId))) if s != first]
            planted = tuple([first] + extras[:count - 1])
        specs.append(ScenarioSpec(
            scenario_number=n, domain=domain, doc_kind=kind, planted=planted, seed=seed,
        ))
    return specs


def generate_case_corpus(seed: int) -> Corpus:
    documents = []
    annotations = []
    for spec in corpus_plan(seed):
        doc, truth = generate_document(spec)
        documents.append(doc)
        annotations.append(truth)
    return Corpus(documents=documents, annotations=annotations)


def write_case_corpus(corpus: Corpus, directory: str | Path) -> None:
    """Write bodies as .txt files plus the annotations file next to them."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for doc in corpus.documents:
        stem = doc.id.split("-", 1)[1]
        (directory / f"{stem}.txt").write_text(doc.body, encoding="utf-8")
    write_annotations(corpus.annotations, directory / "annotations.json")


def build_training_dataset(seed: int) -> list[TrainingRecord]:
    """12 smells x 80 short texts, half positive and half negative, with the
    eight domains cycled evenly inside each smell block."""
    records = []
    half = DATASET_PER_SMELL // 2
    for definition in catalog():
        smell = definition.id
        for i in range(DATASET_PER_SMELL):
            positive = i < half
            domain = DOMAINS[i % len(DOMAINS)]
            rng = random.Random(f"dataset:{seed}:{smell.value}:{i}")
            slots = _slots(domain, rng)
            if positive:
                context = rng.choice(_CONTEXT_SENTENCES).format(**slots)
                text = context + " " + signature_sentence(smell, slots, rng)
            else:
                first, second = rng.sample(list(_NEGATIVE_SENTENCES), 2)
                text = first.format(**slots) + " " + second.format(**slots)
            records.append(TrainingRecord(smell=smell, label=positive, domain=domain, text=text))
    return records


def training_dataset_jsonl(records: Sequence[TrainingRecord]) -> str:
    return "\n".join(record.to_json_line() for record in records) + "\n"
