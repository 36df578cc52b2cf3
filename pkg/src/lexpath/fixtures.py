"""Built-in bundles and generators for demos, tests and benchmarks.

Everything here is synthetic.  The demo bundle models the classic
landlord-tenant lateness dispute (rent over three weeks late, or frequent
lateness causing serious prejudice) because it exercises every engine
feature in a few blocks: branching criteria, conclusion chains, shared
conclusions reached from several paths, and case summaries of both
polarities.  The generators produce arbitrarily large valid bundles and
sentence corpora from a seed, plus helpers that plant specific defects
for validator tests.
"""
from __future__ import annotations

import datetime as dt
import random

from .cases import CaseRecord, CaseStore, CriterionSummary, OutcomeSummary, Polarity
from .interchange import Bundle, BundleMetadata, CorpusRecord
from .schema_model import (
    Answer,
    ConclusionBlock,
    CriterionBlock,
    NextStep,
    Schema,
)

# --- demo bundle ----------------------------------------------------------

TERMINATION_NEXT_STEPS = [
    NextStep(
        title="File an application with the rental tribunal",
        text="Submit a lease termination application to the rental tribunal "
             "and keep a copy of every notice, receipt and message about the "
             "late payments.",
    ),
    NextStep(
        title="Consider a payment agreement",
        text="A written agreement on a payment schedule can settle the "
             "dispute without a hearing and keeps the lease in place.",
    ),
]


def demo_schema() -> Schema:
    blocks = {
        "role": CriterionBlock(
            id="role",
            title="Are you a tenant or a landlord?",
            description="Pick the role that matches your situation. The "
                        "questions and case examples differ for each side.",
            answers=[
                Answer(id="tenant", label="Tenant", next="issues_tenant",
                       role_tag="tenant"),
                Answer(id="landlord", label="Landlord", next="issues_landlord",
                       role_tag="landlord"),
            ],
        ),
        "issues_landlord": CriterionBlock(
            id="issues_landlord",
            title="What situation are you facing?",
            description="Choose the issue closest to yours.",
            answers=[
                Answer(id="nonpayment",
                       label="My tenant does not pay their rent",
                       next="late_now", pathway_id="landlord-rent-unpaid"),
                Answer(id="late",
                       label="My tenant is often late paying their rent",
                       next="late_now", pathway_id="landlord-rent-late"),
                Answer(id="other", label="Other", next="other_issue",
                       pathway_id="landlord-other"),
            ],
        ),
        "issues_tenant": CriterionBlock(
            id="issues_tenant",
            title="What situation are you facing?",
            description="Choose the issue closest to yours.",
            answers=[
                Answer(id="raise",
                       label="My landlord wants to raise my rent",
                       next="rent_raise", pathway_id="tenant-rent-raise"),
                Answer(id="other", label="Other", next="other_issue",
                       pathway_id="tenant-other"),
            ],
        ),
        "late_now": CriterionBlock(
            id="late_now",
            title="Is the rent currently more than three weeks late?",
            description="Count from the day the rent was due under the "
                        "lease. Partial payments count for the part that "
                        "was paid.",
            answers=[
                Answer(id="yes", label="Yes", next="term"),
                Answer(id="no", label="No", next="freq_late"),
            ],
        ),
        "freq_late": CriterionBlock(
            id="freq_late",
            title="Is the tenant frequently late in paying the rent?",
            description="There is no fixed number of late payments that "
                        "counts as frequent; judges weigh how often the "
                        "rent arrived late and over what period. The cases "
                        "below show where judges drew the line.",
            answers=[
                Answer(id="yes", label="Yes", next="prejudice"),
                Answer(id="no", label="No", next="no_term"),
            ],
        ),
        "prejudice": CriterionBlock(
            id="prejudice",
            title="Does the frequent lateness cause you serious prejudice?",
            description="Serious prejudice means concrete harm to the "
                        "landlord, for example being unable to pay the "
                        "building's own charges because the rent is late.",
            answers=[
                Answer(id="yes", label="Yes", next="term"),
                Answer(id="no", label="No", next="no_term"),
            ],
        ),
        "term": ConclusionBlock(
            id="term",
            title="A judge could terminate the lease",
            explanation="Under article 1971 of the Civil Code of Québec, a "
                        "landlord may ask the tribunal to end the lease when "
                        "the rent is more than three weeks late, or when "
                        "frequent late payments cause the landlord serious "
                        "prejudice. Your answers describe a situation where "
                        "a judge could end the lease.",
            next_steps=list(TERMINATION_NEXT_STEPS),
            next="pay_order",
        ),
        "pay_order": ConclusionBlock(
            id="pay_order",
            title="A judge could order payment of the rent owed",
            explanation="Along with or instead of ending the lease, the "
                        "tribunal can order the tenant to pay the rent that "
                        "is owed, usually with interest.",
            next_steps=[
                NextStep(
                    title="Gather proof of the amounts owed",
                    text="Bring the lease, a rent ledger and any payment "
                         "records to show how much rent is outstanding.",
                ),
            ],
        ),
        "no_term": ConclusionBlock(
            id="no_term",
            title="A judge would likely not terminate the lease",
            explanation="Based on your answers, the conditions for ending "
                        "the lease over late rent are not met: the rent is "
                        "not more than three weeks late, and the lateness "
                        "is either not frequent or causes no serious "
                        "prejudice.",
            next_steps=[
                NextStep(
                    title="Keep a record of payments",
                    text="Track payment dates and amounts; a later "
                         "application will depend on this history.",
                ),
                NextStep(
                    title="Consider a payment agreement",
                    text="A written agreement on a payment schedule can "
                         "settle the dispute without a hearing and keeps "
                         "the lease in place.",
                ),
            ],
        ),
        "rent_raise": ConclusionBlock(
            id="rent_raise",
            title="You can refuse the rent increase",
            explanation="A tenant who receives a rent increase notice can "
                        "refuse it in writing within one month. Refusing "
                        "does not end the lease; the landlord must then "
                        "apply to the tribunal to have the new rent fixed.",
            next_steps=[
                NextStep(
                    title="Answer the notice in writing",
                    text="Send the landlord a written refusal within one "
                         "month of receiving the increase notice.",
                ),
            ],
        ),
        "other_issue": ConclusionBlock(
            id="other_issue",
            title="Your issue is not covered yet",
            explanation="This guide only covers a few rental disputes so "
                        "far. Your answers do not match any of them.",
            next_steps=[
                NextStep(
                    title="Tell us what happened",
                    text="Describe your issue in the feedback form; issues "
                         "reported often are added first.",
                ),
            ],
        ),
    }
    return Schema(id="rental-disputes-demo", version="1.0.0", locale="en-CA",
                  blocks=blocks, start="role")


_DEMO_CASES = [
    # (case_id, date, criterion links, outcome links)
    ("LT-2021-0147", dt.date(2021, 3, 15),
     [("freq_late", Polarity.APPLIED,
       "The tenant paid the rent late 7 times in the 12 months before the "
       "hearing, which the judge considered frequent lateness.")],
     [("term", "The lease was terminated.")]),
    ("LT-2020-0892", dt.date(2020, 11, 2),
     [("freq_late", Polarity.NOT_APPLIED,
       "The tenant was late twice over 3 months, which the judge did not "
       "consider frequent.")],
     [("no_term", "The lease was not terminated.")]),
    ("LT-2022-0310", dt.date(2022, 5, 19),
     [("freq_late", Polarity.APPLIED,
       "The rent arrived after the first of the month 10 times in 11 "
       "months.")],
     [("pay_order", "The judge ordered the tenant to pay their rent.")]),
    ("LT-2019-1203", dt.date(2019, 9, 30),
     [("freq_late", Polarity.NOT_APPLIED,
       "Two late payments over 5 months were not found to be frequent.")],
     [("no_term", "The judge dismissed the request to end the lease.")]),
    ("LT-2021-0555", dt.date(2021, 6, 22),
     [("prejudice", Polarity.APPLIED,
       "Because the rent kept arriving late, the landlord could not make "
       "the mortgage payments on the building.")],
     [("term", "The repeated lateness caused serious prejudice and the "
               "lease was terminated.")]),
    ("LT-2020-0471", dt.date(2020, 2, 14),
     [("prejudice", Polarity.NOT_APPLIED,
       "The landlord did not show any concrete harm caused by the late "
       "payments.")],
     [("no_term", "The tribunal found no serious prejudice and kept the "
                  "lease in force.")]),
    ("LT-2022-0789", dt.date(2022, 10, 11),
     [("late_now", Polarity.APPLIED,
       "The rent had been unpaid for six weeks at the time of the "
       "hearing.")],
     [("term", "The lease was resiliated for non-payment of rent."),
      ("pay_order", "The tenant was ordered to pay the rent owed with "
                    "interest.")]),
    ("LT-2019-0333", dt.date(2019, 4, 8),
     [("late_now", Polarity.NOT_APPLIED,
       "The arrears were under three weeks at the hearing date.")],
     [("no_term", "The application was premature and was dismissed.")]),
    ("LT-2023-0099", dt.date(2023, 1, 20),
     [],
     [("rent_raise", "The tribunal fixed the new rent after the tenant "
                     "refused the proposed increase.")]),
    ("LT-2018-0654", dt.date(2018, 12, 5),
     [],
     [("other_issue", "The tribunal referred the parties to the recourse "
                      "that fits their dispute.")]),
]


def demo_store(schema: Schema) -> CaseStore:
    store = CaseStore(schema)
    for case_id, date, crit_links, out_links in _DEMO_CASES:
        store.add_case(CaseRecord(
            case_id=case_id,
            citation=f"Rental Tribunal, file {case_id}",
            decision_date=date,
        ))
        for criterion_id, polarity, text in crit_links:
            store.link_criterion_summary(CriterionSummary(
                case_id=case_id, criterion_id=criterion_id,
                polarity=polarity, summary=text))
        for conclusion_id, text in out_links:
            store.link_outcome_summary(OutcomeSummary(
                case_id=case_id, conclusion_id=conclusion_id, summary=text))
    return store


def demo_bundle() -> Bundle:
    schema = demo_schema()
    return Bundle(
        metadata=BundleMetadata(
            title="Rental disputes demo",
            locale="en-CA",
            published_date=dt.date(2024, 3, 1),
        ),
        schema=schema,
        store=demo_store(schema),
    )


# --- mini bundle: the smallest interesting schema -------------------------

def mini_lateness_schema() -> Schema:
    blocks = {
        "freq_late": CriterionBlock(
            id="freq_late",
            title="Is the tenant frequently late in paying the rent?",
            answers=[
                Answer(id="yes", label="Yes", next="prejudice"),
                Answer(id="no", label="No", next="no_term"),
            ],
        ),
        "prejudice": CriterionBlock(
            id="prejudice",
            title="Does the frequent lateness cause serious prejudice?",
            answers=[
                Answer(id="yes", label="Yes", next="term"),
                Answer(id="no", label="No", next="no_term"),
            ],
        ),
        "term": ConclusionBlock(
            id="term",
            title="The lease can be terminated",
            explanation="Frequent lateness causing serious prejudice allows "
                        "termination.",
        ),
        "no_term": ConclusionBlock(
            id="no_term",
            title="The lease cannot be terminated for lateness",
            explanation="The conditions for termination over lateness are "
                        "not met.",
        ),
    }
    return Schema(id="mini-lateness", version="1.0.0", locale="en-CA",
                  blocks=blocks, start="freq_late")


def mini_lateness_bundle() -> Bundle:
    schema = mini_lateness_schema()
    store = CaseStore(schema)
    rows = [
        ("C-001", dt.date(2021, 3, 15), "freq_late", Polarity.APPLIED,
         "Late 7 times in 12 months; found frequent.", "term",
         "The lease was terminated."),
        ("C-002", dt.date(2020, 11, 2), "freq_late", Polarity.NOT_APPLIED,
         "Late 2 times in 3 months; not found frequent.", "no_term",
         "The lease was not terminated."),
        ("C-003", dt.date(2022, 1, 7), "prejudice", Polarity.APPLIED,
         "The landlord missed mortgage payments.", "term",
         "The lease was terminated with an order to vacate."),
        ("C-004", dt.date(2019, 6, 30), "prejudice", Polarity.NOT_APPLIED,
         "No concrete harm was shown.", "no_term",
         "The application was dismissed."),
    ]
    for case_id, date, criterion_id, polarity, crit_text, conclusion_id, out_text in rows:
        store.add_case(CaseRecord(case_id=case_id,
                                  citation=f"Rental Tribunal, file {case_id}",
                                  decision_date=date))
        store.link_criterion_summary(CriterionSummary(
            case_id=case_id, criterion_id=criterion_id,
            polarity=polarity, summary=crit_text))
        store.link_outcome_summary(OutcomeSummary(
            case_id=case_id, conclusion_id=conclusion_id, summary=out_text))
    return Bundle(
        metadata=BundleMetadata(title="Mini lateness bundle", locale="en-CA",
                                published_date=dt.date(2024, 1, 1)),
        schema=schema,
        store=store,
    )


# --- synthetic generators -------------------------------------------------

_ANSWER_LABELS = ["Yes", "No", "Partly", "Not sure"]


def generate_synthetic(
    seed: int,
    n_criterion: int,
    n_conclusion: int,
    n_cases: int = 0,
    extra_edge_rate: float = 0.25,
) -> Bundle:
    """A random valid bundle, pure in the seed.

    Blocks are wired in topological order (edges only point forward), so
    the schema is acyclic by construction, every block is reachable, and
    validation comes back clean.  Criteria carry 2-4 answers; slots left
    unwired become TERMINAL or, at ``extra_edge_rate``, an extra forward
    edge, which produces blocks with several incoming paths.
    """
    if n_criterion + n_conclusion < 1:
        raise ValueError("need at least one block")
    rng = random.Random(seed)
    kinds = ["criterion"] * n_criterion + ["conclusion"] * n_conclusion
    if len(kinds) > 1:
        tail = kinds[1:]
        rng.shuffle(tail)
        kinds = [kinds[0]] + tail

    blocks: dict[str, CriterionBlock | ConclusionBlock] = {}
    order: list[str] = []
    # Unwired outgoing slots of already-placed blocks: (block_id, answer_idx)
    # where answer_idx is None for a conclusion's single edge.
    open_slots: list[tuple[str, int | None]] = []

    for i, kind in enumerate(kinds):
        bid = f"b{i:03d}"
        if kind == "criterion":
            n_answers = rng.randint(2, 4)
            answers = [
                Answer(id=f"a{j}", label=_ANSWER_LABELS[j],
                       next=None)
                for j in range(n_answers)
            ]
            block: CriterionBlock | ConclusionBlock = CriterionBlock(
                id=bid,
                title=f"Does condition {i} hold in your situation?",
                description=f"Details that explain condition {i}.",
                answers=answers,
            )
        else:
            block = ConclusionBlock(
                id=bid,
                title=f"Consequence {i} follows",
                explanation=f"Your answers establish consequence {i}.",
                next_steps=[NextStep(title=f"Step about consequence {i}",
                                     text=f"What to do about consequence {i}.")]
                if rng.random() < 0.5 else [],
            )
        if i > 0:
            # Attach to a random open slot of an earlier block.  At least
            # one is always open: every block adds at least one slot and
            # consumes at most one.
            slot_pos = rng.randrange(len(open_slots))
            owner_id, answer_idx = open_slots.pop(slot_pos)
            _set_slot(blocks[owner_id], answer_idx, bid)
        blocks[bid] = block
        order.append(bid)
        if isinstance(block, CriterionBlock):
            open_slots.extend((bid, j) for j in range(len(block.answers)))
        else:
            open_slots.append((bid, None))

    index_of = {bid: i for i, bid in enumerate(order)}
    for owner_id, answer_idx in open_slots:
        later = [b for b in order if index_of[b] > index_of[owner_id]]
        if later and rng.random() < extra_edge_rate:
            _set_slot(blocks[owner_id], answer_idx, rng.choice(later))
        # otherwise the slot stays TERMINAL

    schema = Schema(id=f"synthetic-{seed}", version="1.0.0", locale="en-CA",
                    blocks=blocks, start=order[0])

    store = CaseStore(schema)
    criteria = [bid for bid in order
                if isinstance(blocks[bid], CriterionBlock)]
    conclusions = [bid for bid in order
                   if isinstance(blocks[bid], ConclusionBlock)]
    base = dt.date(2015, 1, 1)
    for c in range(n_cases):
        case_id = f"case-{seed}-{c:04d}"
        store.add_case(CaseRecord(
            case_id=case_id,
            citation=f"Synthetic Tribunal, file {case_id}",
            decision_date=base + dt.timedelta(days=rng.randrange(0, 3000)),
        ))
        for criterion_id in rng.sample(criteria, min(len(criteria), rng.randint(0, 3))):
            store.link_criterion_summary(CriterionSummary(
                case_id=case_id, criterion_id=criterion_id,
                polarity=rng.choice([Polarity.APPLIED, Polarity.NOT_APPLIED]),
                summary=f"How case {case_id} treated {criterion_id}."))
        for conclusion_id in rng.sample(conclusions,
                                        min(len(conclusions), rng.randint(0, 2))):
            store.link_outcome_summary(OutcomeSummary(
                case_id=case_id, conclusion_id=conclusion_id,
                summary=f"What case {case_id} decided at {conclusion_id}."))

    return Bundle(
        metadata=BundleMetadata(title=f"Synthetic bundle {seed}",
                                locale="en-CA",
                                published_date=dt.date(2024, 1, 1)),
        schema=schema,
        store=store,
    )


def random_bundle(seed: int, min_blocks: int = 2, max_blocks: int = 120,
                  with_cases: bool = True) -> Bundle:
    """A random bundle whose size is itself drawn from the seed."""
    rng = random.Random(seed * 2 + 1)
    total = rng.randint(min_blocks, max_blocks)
    n_criterion = rng.randint(1, total)
    n_cases = rng.randint(0, 12) if with_cases else 0
    return generate_synthetic(seed, n_criterion, total - n_criterion,
                              n_cases=n_cases)


def deployed_scale_bundle(seed: int = 2024) -> Bundle:
    """A bundle at the block counts of a full production schema."""
    return generate_synthetic(seed, n_criterion=127, n_conclusion=146,
                              n_cases=80)


def _set_slot(block: CriterionBlock | ConclusionBlock,
              answer_idx: int | None, target: str | None) -> None:
    if answer_idx is None:
        block.next = target
    else:
        block.answers[answer_idx].next = target


def _edge_slots(schema: Schema,
                only_wired: bool = False) -> list[tuple[str, int | None, str | None]]:
    slots = []
    for bid, block in schema.blocks.items():
        if isinstance(block, CriterionBlock):
            for j, ans in enumerate(block.answers):
                if not only_wired or ans.next is not None:
                    slots.append((bid, j, ans.next))
        else:
            if not only_wired or block.next is not None:
                slots.append((bid, None, block.next))
    return slots


def inject_dangling_edges(schema: Schema, rng: random.Random,
                          count: int = 1) -> list[tuple[str, str]]:
    """Redirect ``count`` distinct edge slots to ids that do not exist.
    Mutates the schema; returns the planted (block_id, missing_target)
    pairs."""
    slots = _edge_slots(schema)
    count = min(count, len(slots))
    planted = []
    for k, (bid, answer_idx, _old) in enumerate(rng.sample(slots, count)):
        missing = f"missing-{k}-{rng.randrange(10**6)}"
        _set_slot(schema.blocks[bid], answer_idx, missing)
        planted.append((bid, missing))
    return planted


def inject_cycle(schema: Schema, rng: random.Random) -> tuple[str, str]:
    """Redirect one edge back to a block on its own path from the start,
    creating exactly one cycle.  Mutates the schema; returns the redirected
    (source_block, target_block) edge.  The schema must have at least one
    block reachable from start with an outgoing slot."""
    path = [schema.start]
    # Random walk forward to collect a path; every prefix is an ancestor
    # chain, so pointing any edge of the last node at a path member closes
    # a cycle.
    while True:
        block = schema.blocks[path[-1]]
        if isinstance(block, CriterionBlock):
            targets = [a.next for a in block.answers if a.next is not None]
        else:
            targets = [block.next] if block.next is not None else []
        nxt = rng.choice(targets) if targets else None
        if nxt is None or rng.random() < 0.3:
            break
        path.append(nxt)
    source = path[-1]
    target = rng.choice(path)
    block = schema.blocks[source]
    if isinstance(block, CriterionBlock):
        idx: int | None = rng.randrange(len(block.answers))
    else:
        idx = None
    _set_slot(block, idx, target)
    return source, target


# --- synthetic sentence corpus --------------------------------------------

_TOPICS = [
    ("rent-lateness", "rent payment late weeks frequently delay arrears owed monthly due"),
    ("lease-termination", "terminate resiliation lease end cancel notice eviction order"),
    ("bedbugs", "bedbug infestation extermination pest treatment bites mattress unit"),
    ("repairs", "repair maintenance broken urgent plumbing leak ceiling damage work"),
    ("noise", "noise neighbour disturbance loud night party complaints peaceful enjoyment"),
    ("deposit", "deposit advance illegal amount claim reimbursement first month"),
    ("sublet", "sublet assign transfer consent refusal sublease occupant permission"),
    ("heating", "heating heat winter temperature cold degrees radiator insufficient"),
    ("mold", "mould humidity water infiltration health hazard spores bathroom window"),
    ("rent-increase", "increase raise adjustment fixation rate percentage notice contest"),
    ("abandonment", "abandoned left premises moved effects keys vacated departure"),
    ("access", "access visit entry refusal landlord notice prospective purchaser photos"),
    ("harassment", "harassment pressure repeated conduct distress damages quiet threats"),
    ("insalubrity", "unfit habitation insalubrious conditions vermin unsafe inspection municipal"),
    ("retake", "repossession retake dwelling family member good faith intention occupy"),
]

_FILLER = (
    "the tribunal found that the tenant",
    "the landlord testified that",
    "the evidence showed that",
    "the judge noted that the lessee",
    "according to the lease the",
    "witnesses stated that the",
    "the hearing established that",
    "the lessor argued that",
)

_QUERY_STEMS = [
    "tenant frequently late paying rent",
    "bedbug infestation in the apartment",
    "landlord refuses urgent repairs",
    "noise disturbing peaceful enjoyment",
    "terminate the lease before the end",
    "rent increase contestation",
    "mould and humidity in bathroom",
    "heating insufficient during winter",
    "sublet the apartment consent",
    "abandoned the premises",
]


def generate_corpus(seed: int, n_cases: int,
                    sent_lo: int = 6, sent_hi: int = 12) -> list[CorpusRecord]:
    """Synthetic decisions: each case sticks to one topic with occasional
    words from a second, which gives the corpus the clustered structure of
    real tribunal text."""
    rng = random.Random(seed)
    base = dt.date(2015, 1, 1)
    records = []
    for ci in range(n_cases):
        topic_name, words = _TOPICS[rng.randrange(len(_TOPICS))]
        wlist = words.split()
        extra_words = _TOPICS[rng.randrange(len(_TOPICS))][1].split()
        sentences = []
        for _ in range(rng.randint(sent_lo, sent_hi)):
            k = rng.randint(4, 8)
            toks = rng.sample(wlist, min(k, len(wlist)))
            if rng.random() < 0.3:
                toks += rng.sample(extra_words, 2)
            rng.shuffle(toks)
            sentences.append(f"{rng.choice(_FILLER)} {' '.join(toks)}.")
        case_id = f"corpus-{ci:05d}"
        records.append(CorpusRecord(
            case_id=case_id,
            citation=f"Synthetic Tribunal, file {case_id}",
            decision_date=base + dt.timedelta(days=rng.randrange(0, 3000)),
            sentences=sentences,
            extra={"topic": topic_name},
        ))
    return records


def sample_queries(seed: int, n: int) -> list[str]:
    """Query strings in the corpus vocabulary, for recall measurements."""
    rng = random.Random(seed + 1)
    out = []
    for _ in range(n):
        stem = rng.choice(_QUERY_STEMS)
        topic_words = rng.choice(_TOPICS)[1].split()
        extra = " ".join(rng.sample(topic_words, 2))
        out.append(stem if rng.random() < 0.5 else f"{stem} {extra}")
    return out
