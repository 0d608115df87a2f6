"""Per-question orchestration: biased generation, the verify-and-repair loop,
and consensus over the candidate set.

The repair loop keeps one growing conversation per question: the generation
prompt, each generated query, and each round's feedback.  A query that fails
a strong verifier is rejected outright; one that passes all strong checks and
at least one weak check joins the candidate pool.  Passing everything ends
the loop confidently.  When the loop ends without confidence, the consensus
step votes over candidate answers (strict majority of the pool), falls back
to empty-answer candidates, and otherwise returns (NK, NA).
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .dataset import DatasetSplit, QAExample
from .gateway import GatewayError, GenerationGateway, Message, RecordingGateway, assistant, user
from .kb import KnowledgeBase
from .prompts import render_prompt
from .query import Literal, LogicalForm
from .retrieval import RetrievalCaps, RetrievalContext, render_context_fields, retrieve_union
from .verifiers import VerifierSuite, run_suite


@dataclass(frozen=True)
class Candidate:
    lf: LogicalForm
    answer: frozenset
    weak_profile: tuple[tuple[str, bool], ...]
    back_translation: str | None
    iteration: int


@dataclass(frozen=True)
class FunConfig:
    n: int = 4  # repair rounds after the initial query; n+1 queries total
    answerable_mode: bool = False
    mediator_classes: frozenset = frozenset()
    caps: RetrievalCaps = RetrievalCaps()
    templates_dir: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def suite(self) -> VerifierSuite:
        return VerifierSuite(self.answerable_mode, self.mediator_classes, self.templates_dir)


@dataclass
class PipelineOutcome:
    lf: LogicalForm  # may be the NK sentinel
    answer: frozenset | None  # None means NA
    confident: bool
    trace: dict
    error: str | None = None


@dataclass
class FunResult:
    confident: bool
    lf: LogicalForm
    answer: frozenset | None
    candidates: list[Candidate]
    iterations: list[dict]
    error: str | None = None


def _answer_json(answer: frozenset | None):
    if answer is None:
        return "NA"
    entities = sorted(v for v in answer if isinstance(v, str))
    literals = sorted(
        (v for v in answer if isinstance(v, Literal)), key=lambda l: (l.datatype, str(l.value))
    )
    return entities + [{"literal": l.value, "type": l.datatype} for l in literals]


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

def build_pun_prompt(
    kb: KnowledgeBase,
    question: str,
    ctx: RetrievalContext,
    fewshots: tuple[QAExample, ...] = (),
    templates_dir: str | None = None,
) -> str:
    """Header, the NK exemplar, optional few-shot exemplars, then the question."""
    blocks = [
        render_prompt("pun-header", {}, templates_dir),
        render_prompt("pun-nk-exemplar", {}, templates_dir),
    ]
    for shot in fewshots:
        lf_text = "NK" if shot.gold_lf.is_nk else shot.gold_lf.surface
        blocks.append(f"Question: {shot.question}\nsparql:{lf_text}")
    bindings = {"question": question}
    bindings.update(render_context_fields(kb, ctx))
    blocks.append(render_prompt("pun-question", bindings, templates_dir))
    return "\n\n".join(blocks)


_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n(.*?)\n?```$", re.S)


def parse_reply(reply: str, dialect: str = "sparql") -> LogicalForm:
    """Reply text to LogicalForm; "NK" maps to the sentinel, parse failures
    are recorded on the form for the syntax verifier to report."""
    text = reply.strip()
    fenced = _FENCE_RE.match(text)
    if fenced:
        text = fenced.group(1).strip()
    return LogicalForm.from_text(dialect, text)


def pun_generate(
    gateway: GenerationGateway,
    kb: KnowledgeBase,
    question: str,
    ctx: RetrievalContext,
    fewshots: tuple[QAExample, ...] = (),
    templates_dir: str | None = None,
) -> LogicalForm:
    """One biased generation call; the reply is parsed, never validated here."""
    prompt = build_pun_prompt(kb, question, ctx, fewshots, templates_dir)
    reply = gateway.complete([user(prompt)])
    return parse_reply(reply)


# ---------------------------------------------------------------------------
# The verify-and-repair loop
# ---------------------------------------------------------------------------

def fun(
    gateway: GenerationGateway,
    kb: KnowledgeBase,
    question: str,
    question_entities: frozenset,
    lf0: LogicalForm,
    cfg: FunConfig,
    ctx: RetrievalContext,
    fewshots: tuple[QAExample, ...] = (),
) -> FunResult:
    """At most cfg.n verify-and-repair rounds over a growing conversation."""
    suite = cfg.suite()
    prompt = build_pun_prompt(kb, question, ctx, fewshots, cfg.templates_dir)
    conversation: list[Message] = [user(prompt), assistant(lf0.surface)]
    candidates: list[Candidate] = []
    iterations: list[dict] = []
    lf = lf0

    for iteration in range(1, cfg.n + 2):
        result = run_suite(lf, question, question_entities, kb, gateway, suite)
        record = {
            "iteration": iteration,
            "lf": lf.surface,
            "parsed": lf.parsed,
            "verdicts": [
                {
                    "verifier": v.verifier_id,
                    "strength": v.strength,
                    "passed": v.passed,
                    "feedback": v.feedback,
                }
                for v in result.verdicts
            ],
            "answer": _answer_json(result.answer) if result.answer is not None else None,
            "admitted": False,
            "all_pass": False,
            "back_translation": result.back_translation,
        }
        iterations.append(record)

        if result.strong_failure is None and not result.weak_failures:
            record["all_pass"] = True
            return FunResult(True, lf, result.answer, candidates, iterations)

        if result.strong_failure is not None:
            feedback_texts = [result.strong_failure.feedback]
        else:
            if result.weak_passes:
                record["admitted"] = True
                candidates.append(
                    Candidate(
                        lf=lf,
                        answer=result.answer,
                        weak_profile=tuple(sorted(result.weak_profile().items())),
                        back_translation=result.back_translation,
                        iteration=iteration,
                    )
                )
            feedback_texts = [v.feedback for v in result.weak_failures]

        if iteration == cfg.n + 1:
            break
        conversation.append(user("\n".join(feedback_texts)))
        reply = gateway.complete(conversation)
        conversation.append(assistant(reply))
        lf = parse_reply(reply)

    return FunResult(False, lf, None, candidates, iterations)


# ---------------------------------------------------------------------------
# Consensus over the candidate set
# ---------------------------------------------------------------------------

def select_best(
    gateway: GenerationGateway,
    question: str,
    candidates: list[Candidate],
    templates_dir: str | None = None,
) -> tuple[Candidate, bool]:
    """Pick the candidate whose back-translation reads closest to the
    question.  Singleton pools short-circuit without a call; an unparseable
    selection falls back to the earliest-iteration candidate (flagged)."""
    if not candidates:
        raise ValueError("select_best needs a non-empty candidate list")
    if len(candidates) == 1:
        return candidates[0], False
    options = "\n".join(
        f"{i}. pred_nl: {c.back_translation or c.lf.surface}"
        for i, c in enumerate(candidates, start=1)
    )
    prompt = render_prompt(
        "scun-select",
        {"question": question, "options": options, "count": len(candidates)},
        templates_dir,
    )
    _set_purpose(gateway, "scun-select")
    reply = gateway.complete([user(prompt)])
    _set_purpose(gateway, "generate")
    match = re.search(r"\d+", reply)
    if match:
        index = int(match.group())
        if 1 <= index <= len(candidates):
            return candidates[index - 1], False
    earliest = min(candidates, key=lambda c: c.iteration)
    return earliest, True


def _set_purpose(gateway: GenerationGateway, purpose: str) -> None:
    if hasattr(gateway, "purpose"):
        gateway.purpose = purpose


def scun(
    gateway: GenerationGateway,
    question: str,
    candidates: list[Candidate],
    templates_dir: str | None = None,
) -> tuple[LogicalForm, frozenset | None, dict]:
    """Consensus for a non-confident loop.

    (1) Group candidates by non-empty answer; the most popular answer wins
    when its supporters strictly exceed half the pool.  (2) Otherwise any
    empty-answer candidate is selected with answer NA.  (3) Otherwise (NK, NA).
    """
    info: dict = {"pool": len(candidates)}
    groups: dict[frozenset, list[Candidate]] = {}
    for c in candidates:
        if c.answer:
            groups.setdefault(c.answer, []).append(c)

    if groups:
        best = max(
            groups.values(), key=lambda g: (len(g), -min(c.iteration for c in g))
        )
        threshold = len(candidates) // 2
        info["top_supporters"] = len(best)
        info["threshold"] = threshold
        if len(best) > threshold:
            chosen, fallback = select_best(gateway, question, best, templates_dir)
            info.update(branch="non-empty-consensus", selected_iteration=chosen.iteration,
                        select_fallback=fallback)
            return chosen.lf, chosen.answer, info

    empties = [c for c in candidates if not c.answer]
    if empties:
        chosen, fallback = select_best(gateway, question, empties, templates_dir)
        info.update(branch="empty-answer", selected_iteration=chosen.iteration,
                    select_fallback=fallback)
        return chosen.lf, None, info

    info["branch"] = "no-consensus"
    return LogicalForm.nk(), None, info


# ---------------------------------------------------------------------------
# End-to-end
# ---------------------------------------------------------------------------

def run_question(
    gateway: GenerationGateway,
    kb: KnowledgeBase,
    retrievers: list,
    example: QAExample,
    cfg: FunConfig = FunConfig(),
    fewshots: tuple[QAExample, ...] = (),
) -> PipelineOutcome:
    """retrieve -> generate -> repair loop -> (confident result | consensus).

    Gateway failures abort the question with an error marker in the trace;
    they never raise out of here.
    """
    recorder = RecordingGateway(gateway)
    trace: dict = {
        "question": example.question,
        "linked_entities": [{"mention": m, "id": eid} for m, eid in example.linked_entities],
    }
    try:
        ctx = retrieve_union(retrievers, kb, example.question, list(example.linked_entities), cfg.caps)
        lf0 = pun_generate(recorder, kb, example.question, ctx, fewshots, cfg.templates_dir)
        result = fun(
            recorder, kb, example.question, example.question_entities(), lf0, cfg, ctx, fewshots
        )
        trace["iterations"] = result.iterations
        trace["confident"] = result.confident
        if result.confident:
            lf, answer = result.lf, result.answer
            trace["scun"] = None
        else:
            lf, answer, info = scun(recorder, example.question, result.candidates, cfg.templates_dir)
            trace["scun"] = info
        error = None
    except GatewayError as err:
        trace["iterations"] = trace.get("iterations", [])
        trace["confident"] = False
        trace["scun"] = None
        trace["gateway_error"] = str(err)
        lf, answer, error = LogicalForm.nk(), None, str(err)
    trace["llm"] = recorder.log
    trace["outcome"] = {
        "lf": "NK" if lf.is_nk else lf.surface,
        "answer": _answer_json(answer),
        "confident": trace.get("confident", False),
    }
    if error:
        trace["outcome"]["error"] = error
    return PipelineOutcome(lf, answer, trace["outcome"]["confident"], trace, error)


def run_dataset(
    gateway: GenerationGateway,
    kb: KnowledgeBase,
    retrievers: list,
    split: DatasetSplit,
    cfg: FunConfig = FunConfig(),
    fewshots: tuple[QAExample, ...] = (),
    workers: int = 1,
) -> list[PipelineOutcome]:
    """Process questions independently; output order matches input order."""
    if workers <= 1:
        return [
            run_question(gateway, kb, retrievers, example, cfg, fewshots)
            for example in split.examples
        ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run_question, gateway, kb, retrievers, example, cfg, fewshots)
            for example in split.examples
        ]
        return [f.result() for f in futures]
