"""Retrieval context assembly for generation prompts.

A retrieval context holds the top classes, relations and entity-rooted data
paths for a question, plus the linked entities.  Retrievers are pluggable:
anything callable as ``retriever(kb, question, linked_entities) -> context``
works, including external subprocess commands speaking the context's JSON
shape.  The built-in baseline is purely lexical.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass

from .kb import KnowledgeBase, paths_from_entity
from .query import CanonicalQuery, parse_sparql, render_sparql

DEFAULT_MAX_CLASSES = 10
DEFAULT_MAX_RELATIONS = 10
DEFAULT_MAX_PATHS = 5


@dataclass(frozen=True)
class RetrievalCaps:
    max_classes: int = DEFAULT_MAX_CLASSES
    max_relations: int = DEFAULT_MAX_RELATIONS
    max_paths: int = DEFAULT_MAX_PATHS
    max_path_len: int = 2


@dataclass(frozen=True)
class RetrievalContext:
    classes: tuple[str, ...] = ()
    relations: tuple[str, ...] = ()
    paths: tuple[CanonicalQuery, ...] = ()
    linked_entities: tuple[tuple[str, str], ...] = ()  # (mention, entity id)

    def capped(self, caps: RetrievalCaps) -> "RetrievalContext":
        return RetrievalContext(
            self.classes[: caps.max_classes],
            self.relations[: caps.max_relations],
            self.paths[: caps.max_paths],
            self.linked_entities,
        )


def _tokens(text: str) -> frozenset[str]:
    return frozenset(re.findall(r"[a-z0-9]+", text.lower()))


def _trigrams(text: str) -> frozenset[str]:
    squashed = re.sub(r"[^a-z0-9]+", " ", text.lower()).strip()
    if len(squashed) < 3:
        return frozenset({squashed} if squashed else ())
    return frozenset(squashed[i : i + 3] for i in range(len(squashed) - 2))


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def lexical_score(question: str, label: str, some_id: str) -> float:
    """Token overlap plus character-trigram similarity against label and id."""
    candidate = f"{label} {some_id}"
    return _jaccard(_tokens(question), _tokens(candidate)) + _jaccard(
        _trigrams(question), _trigrams(candidate)
    )


def retrieve_lexical(
    kb: KnowledgeBase,
    question: str,
    linked_entities: list[tuple[str, str]],
    caps: RetrievalCaps = RetrievalCaps(),
) -> RetrievalContext:
    """Lexical baseline: rank schema elements by label/id similarity to the
    question, rank entity paths by summed relation scores.  Zero-scoring
    classes and relations are dropped; ties break by id."""
    class_scores = {
        c.id: lexical_score(question, c.label, c.id) for c in kb.classes.values()
    }
    relation_scores = {
        r.id: lexical_score(question, "", r.id) for r in kb.relations.values()
    }
    classes = tuple(
        cid
        for cid, score in sorted(class_scores.items(), key=lambda kv: (-kv[1], kv[0]))
        if score > 0
    )
    relations = tuple(
        rid
        for rid, score in sorted(relation_scores.items(), key=lambda kv: (-kv[1], kv[0]))
        if score > 0
    )

    linked = tuple((m, eid) for m, eid in linked_entities if kb.has_entity(eid))
    scored_paths = []
    for _, eid in linked:
        for path in paths_from_entity(kb, eid, caps.max_path_len):
            rels = tuple(p.value for _, p, _ in path.patterns)
            score = sum(relation_scores.get(rid, 0.0) for rid in rels)
            scored_paths.append((-score, rels, path))
    scored_paths.sort(key=lambda item: (item[0], item[1]))
    paths = tuple(path for _, _, path in scored_paths)

    return RetrievalContext(classes, relations, paths, linked).capped(caps)


def retrieve_union(
    retrievers: list,
    kb: KnowledgeBase,
    question: str,
    linked_entities: list[tuple[str, str]],
    caps: RetrievalCaps = RetrievalCaps(),
) -> RetrievalContext:
    """Per-field union across retrievers, first-retriever rank priority,
    deduplicated at first occurrence, then re-capped."""
    if not retrievers:
        raise ValueError("at least one retriever is required")
    classes: list[str] = []
    relations: list[str] = []
    paths: list[CanonicalQuery] = []
    path_keys: set[str] = set()
    linked: list[tuple[str, str]] = []
    for retriever in retrievers:
        ctx = retriever(kb, question, linked_entities)
        for cid in ctx.classes:
            if cid not in classes:
                classes.append(cid)
        for rid in ctx.relations:
            if rid not in relations:
                relations.append(rid)
        for path in ctx.paths:
            key = render_sparql(path)
            if key not in path_keys:
                path_keys.add(key)
                paths.append(path)
        for pair in ctx.linked_entities:
            if pair not in linked:
                linked.append(pair)
    return RetrievalContext(tuple(classes), tuple(relations), tuple(paths), tuple(linked)).capped(caps)


# ---------------------------------------------------------------------------
# Wire shape and subprocess plug-ins
# ---------------------------------------------------------------------------

def context_to_json(ctx: RetrievalContext) -> dict:
    return {
        "classes": list(ctx.classes),
        "relations": list(ctx.relations),
        "paths": [render_sparql(p) for p in ctx.paths],
        "linked_entities": [{"mention": m, "id": eid} for m, eid in ctx.linked_entities],
    }


def context_from_json(doc: dict, kb: KnowledgeBase) -> RetrievalContext:
    """Parse the wire shape, dropping ids that do not resolve in the KB."""
    classes = tuple(c for c in doc.get("classes", []) if kb.has_class(c))
    relations = tuple(r for r in doc.get("relations", []) if kb.has_relation(r))
    paths = tuple(parse_sparql(p) for p in doc.get("paths", []))
    linked = tuple(
        (item["mention"], item["id"])
        for item in doc.get("linked_entities", [])
        if kb.has_entity(item["id"])
    )
    return RetrievalContext(classes, relations, paths, linked)


class SubprocessRetriever:
    """External retriever: JSON request on stdin, RetrievalContext JSON on stdout."""

    def __init__(self, command: list[str], timeout: float = 60.0):
        self.command = list(command)
        self.timeout = timeout

    def __call__(self, kb, question, linked_entities) -> RetrievalContext:
        request = {
            "question": question,
            "linked_entities": [{"mention": m, "id": eid} for m, eid in linked_entities],
        }
        proc = subprocess.run(
            self.command,
            input=json.dumps(request),
            capture_output=True,
            text=True,
            timeout=self.timeout,
            check=True,
        )
        return context_from_json(json.loads(proc.stdout), kb)


# ---------------------------------------------------------------------------
# Prompt rendering of context fields
# ---------------------------------------------------------------------------

def render_relation_signature(kb: KnowledgeBase, rid: str) -> str:
    rd = kb.relations.get(rid)
    if rd is None:
        return rid
    return f"{rid} (type:{rd.domain} R type:{rd.range})"


def render_context_fields(kb: KnowledgeBase, ctx: RetrievalContext) -> dict:
    """Bindings for the generation prompt template."""
    entities = " | ".join(f"{m} {eid}" for m, eid in ctx.linked_entities)
    paths = " | ".join(render_sparql(p) for p in ctx.paths)
    classes = " | ".join(ctx.classes)
    relations = " | ".join(render_relation_signature(kb, r) for r in ctx.relations)
    return {
        "entities": entities,
        "paths": paths,
        "classes": classes,
        "relations": relations,
    }
