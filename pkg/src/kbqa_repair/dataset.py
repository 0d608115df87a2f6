"""QA dataset ingestion, few-shot sampling, and unanswerability injection.

The injector pairs KB deletion with question relabeling: questions whose gold
query references deleted schema become schema-level unanswerable (gold query
replaced with NK); questions whose gold query survives but executes empty
become data-level unanswerable (gold answer NA).  Every example also records
the answer the complete, pre-deletion KB would have returned, which the
lenient F1 variant credits.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

from .executor import execute, execute_bindings
from .kb import DeletionPlan, FormatError, KnowledgeBase, delete_elements, validate_plan
from .query import (
    Literal,
    LogicalForm,
    extract_classes,
    extract_entities,
    extract_relations,
)

LABELS = ("answerable", "schema-unans", "data-unans")
CATEGORIES = (
    "missing-class",
    "missing-relation",
    "missing-topic-entity",
    "missing-entity",
    "missing-fact",
    "n/a",
)


class PreconditionError(Exception):
    pass


class InsufficientExamples(Exception):
    pass


@dataclass(frozen=True)
class QAExample:
    question: str
    linked_entities: tuple[tuple[str, str], ...]  # (mention, entity id)
    gold_lf: LogicalForm  # may be the NK sentinel
    gold_answer: frozenset | None  # None means NA
    complete_kb_answer: frozenset | None
    label: str = "answerable"
    category: str = "n/a"

    def validate(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.label == "schema-unans" and not self.gold_lf.is_nk:
            raise ValueError("schema-unans example must have gold_lf = NK")
        if self.label == "data-unans":
            if self.gold_lf.is_nk:
                raise ValueError("data-unans example must keep a concrete gold_lf")
            if self.gold_answer is not None:
                raise ValueError("data-unans example must have gold_answer = NA")

    def question_entities(self) -> frozenset[str]:
        return frozenset(eid for _, eid in self.linked_entities)


@dataclass(frozen=True)
class DatasetSplit:
    name: str
    examples: tuple[QAExample, ...]


# ---------------------------------------------------------------------------
# Wire shape (JSON Lines)
# ---------------------------------------------------------------------------

def _answer_to_json(answer: frozenset | None):
    if answer is None:
        return "NA"
    entities = sorted(v for v in answer if isinstance(v, str))
    literals = sorted(
        (v for v in answer if isinstance(v, Literal)), key=lambda l: (l.datatype, str(l.value))
    )
    return entities + [{"literal": l.value, "type": l.datatype} for l in literals]


def _answer_from_json(doc) -> frozenset | None:
    if doc == "NA":
        return None
    values = []
    for item in doc:
        if isinstance(item, dict):
            values.append(Literal(item["literal"], item.get("type", "string")))
        else:
            values.append(item)
    return frozenset(values)


def example_to_record(example: QAExample) -> dict:
    gold_lf = "NK" if example.gold_lf.is_nk else {
        "dialect": example.gold_lf.dialect,
        "text": example.gold_lf.surface,
    }
    return {
        "question": example.question,
        "linked_entities": [{"mention": m, "id": eid} for m, eid in example.linked_entities],
        "gold_lf": gold_lf,
        "gold_answer": _answer_to_json(example.gold_answer),
        "complete_kb_answer": _answer_to_json(example.complete_kb_answer) if example.complete_kb_answer is not None else [],
        "label": example.label,
        "category": example.category,
    }


def record_to_example(record: dict, line: int | None = None) -> QAExample:
    try:
        raw_lf = record["gold_lf"]
        if raw_lf == "NK":
            gold_lf = LogicalForm.nk()
        else:
            gold_lf = LogicalForm.from_text(raw_lf.get("dialect", "sparql"), raw_lf["text"])
        example = QAExample(
            question=record["question"],
            linked_entities=tuple(
                (item["mention"], item["id"]) for item in record.get("linked_entities", [])
            ),
            gold_lf=gold_lf,
            gold_answer=_answer_from_json(record["gold_answer"]),
            complete_kb_answer=_answer_from_json(record.get("complete_kb_answer", [])),
            label=record.get("label", "answerable"),
            category=record.get("category", "n/a"),
        )
        example.validate()
        return example
    except (KeyError, ValueError, TypeError) as err:
        raise FormatError(f"bad dataset record: {err}", line) from err


def load_split(path: str, name: str = "test") -> DatasetSplit:
    examples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise FormatError(f"invalid JSON: {err.msg}", lineno) from err
            examples.append(record_to_example(record, lineno))
    return DatasetSplit(name, tuple(examples))


def save_split(split: DatasetSplit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for example in split.examples:
            handle.write(json.dumps(example_to_record(example), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Unanswerability injection
# ---------------------------------------------------------------------------

def inject_unanswerability(
    kb: KnowledgeBase, split: DatasetSplit, plan: DeletionPlan
) -> tuple[KnowledgeBase, DatasetSplit]:
    """Delete per plan and relabel each example against the shrunken KB.

    Requires an answerable source: every gold query must execute non-empty on
    the input KB.  Deterministic given (kb, split, plan).
    """
    validate_plan(kb, plan)
    for example in split.examples:
        if example.gold_lf.is_nk or not example.gold_lf.parsed:
            raise PreconditionError(f"source example {example.question!r} has no executable gold query")
        if not execute(kb, example.gold_lf.canonical):
            raise PreconditionError(
                f"source example {example.question!r} already executes empty on the input KB"
            )

    kb2 = delete_elements(kb, plan)
    relabeled = [_relabel(kb, kb2, example) for example in split.examples]
    return kb2, DatasetSplit(split.name, tuple(relabeled))


def _relabel(kb: KnowledgeBase, kb2: KnowledgeBase, example: QAExample) -> QAExample:
    complete = execute(kb, example.gold_lf.canonical)
    q = example.gold_lf.canonical

    missing_classes = sorted(c for c in extract_classes(q) if not kb2.has_class(c))
    missing_relations = sorted(r for r in extract_relations(q) if not kb2.has_relation(r))
    mentioned = {eid for _, eid in example.linked_entities} | extract_entities(q)
    missing_linked = sorted(eid for eid in mentioned if not kb2.has_entity(eid))
    if missing_classes:
        return replace(
            example,
            gold_lf=LogicalForm.nk(),
            gold_answer=None,
            complete_kb_answer=complete,
            label="schema-unans",
            category="missing-class",
        )
    if missing_relations:
        return replace(
            example,
            gold_lf=LogicalForm.nk(),
            gold_answer=None,
            complete_kb_answer=complete,
            label="schema-unans",
            category="missing-relation",
        )
    if missing_linked:
        return replace(
            example,
            gold_lf=LogicalForm.nk(),
            gold_answer=None,
            complete_kb_answer=complete,
            label="schema-unans",
            category="missing-topic-entity",
        )

    answer = execute(kb2, q)
    if answer:
        return replace(example, gold_answer=answer, complete_kb_answer=complete)
    category = _data_level_category(kb, kb2, example)
    return replace(
        example,
        gold_answer=None,
        complete_kb_answer=complete,
        label="data-unans",
        category=category,
    )


def _data_level_category(kb: KnowledgeBase, kb2: KnowledgeBase, example: QAExample) -> str:
    """missing-entity when a deleted entity appears in some original binding;
    missing-fact when only traversed facts were deleted."""
    q = example.gold_lf.canonical
    lost_entities = {eid for eid in kb.entities if not kb2.has_entity(eid)}
    for assignment in execute_bindings(kb, q):
        if any(isinstance(v, str) and v in lost_entities for v in assignment.values()):
            return "missing-entity"
    return "missing-fact"


def make_random_plan(
    kb: KnowledgeBase,
    seed: int,
    n_classes: int = 0,
    n_relations: int = 1,
    n_entities: int = 1,
    n_facts: int = 1,
) -> DeletionPlan:
    """Seed-reproducible random deletion plan over existing elements."""
    rng = random.Random(seed)

    def pick(pool: list, n: int) -> list:
        n = min(n, len(pool))
        return rng.sample(pool, n) if n else []

    return DeletionPlan(
        classes=tuple(pick(sorted(kb.classes), n_classes)),
        relations=tuple(pick(sorted(kb.relations), n_relations)),
        entities=tuple(pick(sorted(kb.entities), n_entities)),
        facts=tuple(pick(sorted(kb.facts, key=lambda f: f.key()), n_facts)),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Few-shot sampling
# ---------------------------------------------------------------------------

def sample_fewshots(split: DatasetSplit, n_ans: int, n_unans: int, seed: int) -> DatasetSplit:
    """Stratified uniform sample, reproducible from the seed."""
    answerable = [e for e in split.examples if e.label == "answerable"]
    unanswerable = [e for e in split.examples if e.label != "answerable"]
    if len(answerable) < n_ans:
        raise InsufficientExamples(
            f"need {n_ans} answerable examples, split has {len(answerable)}"
        )
    if len(unanswerable) < n_unans:
        raise InsufficientExamples(
            f"need {n_unans} unanswerable examples, split has {len(unanswerable)}"
        )
    rng = random.Random(seed)
    chosen = rng.sample(answerable, n_ans) + rng.sample(unanswerable, n_unans)
    return DatasetSplit("fewshot", tuple(chosen))
