"""Deterministic synthetic corpora with planted narratives.

An event pool pairs a small set of reference events (each expanded into
template paraphrases) with a pool of single-sentence distractor events.
Runs draw documents day by day from that pool: a noise run plants one
distribution change in the middle of the timeline, an overlap run bleeds a
shared event across the boundary, and a cluster run emits labeled
narratives for clustering evaluation. Every run writes a manifest from
which the exact document stream can be rebuilt byte for byte.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from .corpus import DAY_SECONDS, Document, NarrativeTriplet, write_documents, write_triplets


class SynthError(ValueError):
    pass


# ---------------------------------------------------------------------------
# verb lexicon: (lemma, sense, third-person form, past participle)
# ---------------------------------------------------------------------------

_VERBS = [
    ("accept", "accept.01", "accepts", "accepted"),
    ("admit", "admit.01", "admits", "admitted"),
    ("announce", "announce.01", "announces", "announced"),
    ("approve", "approve.01", "approves", "approved"),
    ("arrest", "arrest.01", "arrests", "arrested"),
    ("axe", "axe.01", "axes", "axed"),
    ("ban", "ban.01", "bans", "banned"),
    ("begin", "begin.01", "begins", "begun"),
    ("block", "block.01", "blocks", "blocked"),
    ("boost", "boost.01", "boosts", "boosted"),
    ("buy", "buy.01", "buys", "bought"),
    ("call", "call.01", "calls", "called"),
    ("cancel", "cancel.01", "cancels", "canceled"),
    ("carry", "carry.01", "carries", "carried"),
    ("celebrate", "celebrate.01", "celebrates", "celebrated"),
    ("clear", "clear.02", "clears", "cleared"),
    ("close", "close.01", "closes", "closed"),
    ("confirm", "confirm.01", "confirms", "confirmed"),
    ("curb", "curb.01", "curbs", "curbed"),
    ("cut", "cut.01", "cuts", "cut"),
    ("damage", "damage.01", "damages", "damaged"),
    ("declare", "declare.01", "declares", "declared"),
    ("defer", "defer.01", "defers", "deferred"),
    ("delay", "delay.01", "delays", "delayed"),
    ("demolish", "demolish.01", "demolishes", "demolished"),
    ("designate", "designate.01", "designates", "designated"),
    ("detect", "detect.01", "detects", "detected"),
    ("direct", "direct.01", "directs", "directed"),
    ("discover", "discover.01", "discovers", "discovered"),
    ("dispatch", "dispatch.01", "dispatches", "dispatched"),
    ("destroy", "destroy.01", "destroys", "destroyed"),
    ("elect", "elect.01", "elects", "elected"),
    ("elevate", "elevate.01", "elevates", "elevated"),
    ("extend", "extend.01", "extends", "extended"),
    ("find", "find.01", "finds", "found"),
    ("finish", "finish.01", "finishes", "finished"),
    ("halt", "halt.01", "halts", "halted"),
    ("hit", "hit.01", "hits", "hit"),
    ("honor", "honor.01", "honors", "honored"),
    ("host", "host.01", "hosts", "hosted"),
    ("impose", "impose.01", "imposes", "imposed"),
    ("ink", "ink.01", "inks", "inked"),
    ("instruct", "instruct.01", "instructs", "instructed"),
    ("isolate", "isolate.01", "isolates", "isolated"),
    ("issue", "issue.01", "issues", "issued"),
    ("kill", "kill.01", "kills", "killed"),
    ("land", "land.01", "lands", "landed"),
    ("launch", "launch.01", "launches", "launched"),
    ("limit", "limit.01", "limits", "limited"),
    ("log", "log.01", "logs", "logged"),
    ("lower", "lower.01", "lowers", "lowered"),
    ("mandate", "mandate.01", "mandates", "mandated"),
    ("name", "name.01", "names", "named"),
    ("open", "open.01", "opens", "opened"),
    ("order", "order.01", "orders", "ordered"),
    ("pass", "pass.03", "passes", "passed"),
    ("perform", "perform.01", "performs", "performed"),
    ("postpone", "postpone.01", "postpones", "postponed"),
    ("proclaim", "proclaim.01", "proclaims", "proclaimed"),
    ("prolong", "prolong.01", "prolongs", "prolonged"),
    ("protect", "protect.01", "protects", "protected"),
    ("publish", "publish.01", "publishes", "published"),
    ("quarantine", "quarantine.01", "quarantines", "quarantined"),
    ("raise", "raise.01", "raises", "raised"),
    ("reach", "reach.01", "reaches", "reached"),
    ("receive", "receive.01", "receives", "received"),
    ("record", "record.01", "records", "recorded"),
    ("reduce", "reduce.01", "reduces", "reduced"),
    ("register", "register.02", "registers", "registered"),
    ("release", "release.01", "releases", "released"),
    ("report", "report.01", "reports", "reported"),
    ("rescue", "rescue.01", "rescues", "rescued"),
    ("restrict", "restrict.01", "restricts", "restricted"),
    ("reveal", "reveal.01", "reveals", "revealed"),
    ("scrap", "scrap.01", "scraps", "scrapped"),
    ("seal", "seal.01", "seals", "sealed"),
    ("seize", "seize.01", "seizes", "seized"),
    ("select", "select.01", "selects", "selected"),
    ("sell", "sell.01", "sells", "sold"),
    ("send", "send.01", "sends", "sent"),
    ("ship", "ship.01", "ships", "shipped"),
    ("shut", "shut.01", "shuts", "shut"),
    ("sign", "sign.02", "signs", "signed"),
    ("slash", "slash.01", "slashes", "slashed"),
    ("state", "state.01", "states", "stated"),
    ("stop", "stop.01", "stops", "stopped"),
    ("strike", "strike.01", "strikes", "struck"),
    ("suspend", "suspend.01", "suspends", "suspended"),
    ("transport", "transport.01", "transports", "transported"),
    ("unveil", "unveil.01", "unveils", "unveiled"),
    ("upgrade", "upgrade.01", "upgrades", "upgraded"),
    ("verify", "verify.01", "verifies", "verified"),
    ("watch", "watch.01", "watches", "watched"),
    ("win", "win.01", "wins", "won"),
]

_SENSE_OF = {lemma: sense for lemma, sense, _, _ in _VERBS}
_THIRD_OF = {lemma: third for lemma, _, third, _ in _VERBS}
_PP_OF = {lemma: pp for lemma, _, _, pp in _VERBS}
# surface form -> (lemma, kind); third-person forms shadow base-form homographs
_FORM_KIND = {}
for lemma, _, third, _ in _VERBS:
    _FORM_KIND.setdefault(lemma, (lemma, "base"))
    _FORM_KIND[third] = (lemma, "third")
_PP_FORM = {pp: lemma for lemma, _, _, pp in _VERBS}
_AUX = {"is", "are", "was", "were"}

# same-frame substitutes used by the paraphraser
_VERB_SYNONYMS = {
    "confirm": ["verify"],
    "seal": ["close", "shut"],
    "declare": ["proclaim"],
    "restrict": ["limit", "curb"],
    "quarantine": ["isolate"],
    "kill": [],
    "name": ["call", "designate"],
    "report": ["announce", "state"],
    "halt": ["stop", "suspend"],
    "detect": ["find", "discover"],
    "record": ["register", "log"],
    "cut": ["reduce", "slash", "lower"],
    "extend": ["prolong"],
    "upgrade": ["elevate"],
    "impose": ["mandate"],
    "order": ["direct", "instruct"],
    "cancel": ["scrap", "axe"],
    "postpone": ["delay", "defer"],
    "pass": ["approve", "clear"],
    "sign": ["ink"],
    "send": ["dispatch", "ship"],
    "issue": ["publish", "release"],
}

_PHRASE_SYNONYMS = {
    "health emergency": "health crisis",
    "global": "worldwide",
    "outbreak": "epidemic",
    "the city of wuhan": "the chinese city of wuhan",
    "authorities": "officials",
    "travel from china": "trips from china",
    "the white house": "the us administration",
    "cruise ship": "cruise liner",
    "the virus": "the pathogen",
    "doctor": "physician",
    "disease": "illness",
    "death": "fatality",
    "towns": "municipalities",
    "public gatherings": "public assemblies",
    "infection": "case",
    "interest rates": "borrowing costs",
    "quarantine zone": "containment zone",
    "the entire country": "the whole nation",
    "pandemic": "global pandemic",
    "nationwide lockdown": "national lockdown",
    "residents": "citizens",
    "stay home": "remain indoors",
    "large public events": "major public events",
    "summer games": "summer olympics",
    "relief package": "rescue package",
    "stimulus bill": "spending bill",
    "hospital ships": "medical ships",
    "american ports": "us harbors",
    "emergency approval": "emergency authorization",
    "rapid virus tests": "fast virus tests",
    "first american": "first us",
    "japan": "the japanese government",
    "france": "the french government",
    "brazil": "the brazilian government",
    "the french government imposes": "france imposes",
    "the new": "the novel",
    "economic fallout": "economic damage",
    "new york city": "the city of new york",
    "the olympic committee": "olympic organizers",
    "the senate": "us lawmakers",
    "president trump": "the president",
}

_ADJUNCTS = [
    "this week",
    "according to officials",
    "in a dramatic turn",
    "later that day",
    "amid rising concern",
]

_WS_RE = re.compile(r"\s+")


def _clean(sentence: str) -> str:
    sentence = sentence.lower().replace(".", " ").replace("!", " ").replace("?", " ")
    return _WS_RE.sub(" ", sentence).strip()


# ---------------------------------------------------------------------------
# pattern triplet extraction
# ---------------------------------------------------------------------------

def _parse_clause(tokens: list[str]) -> tuple[str, str, str] | None:
    """SVO parse. The passive pattern (aux + participle + by-phrase) wins
    over active forms, marked third-person forms win over base-form
    homographs, and the leftmost match wins within each tier."""
    for i, tok in enumerate(tokens):
        if tok in _AUX and i + 1 < len(tokens) and tokens[i + 1] in _PP_FORM:
            rest = tokens[i + 2:]
            if "by" in rest:
                j = i + 2 + rest.index("by")
                a1 = " ".join(tokens[:i])
                a0 = " ".join(tokens[j + 1:])
                if a0 and a1:
                    return (a0, _SENSE_OF[_PP_FORM[tokens[i + 1]]], a1)
    base_hit = None
    for i, tok in enumerate(tokens):
        if tok in _FORM_KIND:
            lemma, kind = _FORM_KIND[tok]
            a0 = " ".join(tokens[:i])
            a1 = " ".join(tokens[i + 1:])
            if not (a0 and a1):
                continue
            if kind == "third":
                return (a0, _SENSE_OF[lemma], a1)
            if base_hit is None:
                base_hit = (a0, _SENSE_OF[lemma], a1)
    return base_hit


def extract_triplets(sentence: str) -> list[tuple[str, str, str]]:
    """Rule-based (agent, verb sense, patient) extraction for pool sentences.

    Handles simple active/passive clauses, a leading comma-separated
    adjunct, and two clauses joined by ``and``.
    """
    text = _clean(sentence)
    if " and " in text:
        left, right = text.split(" and ", 1)
        first = _parse_clause(left.replace(",", " , ").split())
        second = _parse_clause(right.replace(",", " , ").split())
        if first and second:
            return [first, second]
    if "," in text:
        after = text.split(",", 1)[1].strip()
        parsed = _parse_clause(after.split())
        if parsed:
            return [parsed]
    parsed = _parse_clause(text.split())
    return [parsed] if parsed else []


# ---------------------------------------------------------------------------
# template paraphraser
# ---------------------------------------------------------------------------

def _swap_verb(text: str, surface: str, kind: str, new_lemma: str) -> str:
    new_surface = _THIRD_OF[new_lemma] if kind == "third" else new_lemma
    tokens = text.split()
    tokens[tokens.index(surface)] = new_surface
    return " ".join(tokens)


def _passive(a0: str, lemma: str, a1: str) -> str:
    last = a1.split()[-1]
    aux = "are" if last.endswith("s") and not last.endswith("ss") else "is"
    return f"{a1} {aux} {_PP_OF[lemma]} by {a0}"


def _applicable_phrases(text: str) -> list[tuple[str, str]]:
    hits = []
    for phrase, alt in _PHRASE_SYNONYMS.items():
        m = re.search(rf"(?<![\w']){re.escape(phrase)}(?![\w'])", text)
        if m:
            hits.append((m.start(), phrase, alt))
    hits.sort(key=lambda h: (h[0], -len(h[1])))
    return [(phrase, alt) for _, phrase, alt in hits]


def _swap_phrase(text: str, phrase: str, alt: str) -> str:
    return re.sub(rf"(?<![\w']){re.escape(phrase)}(?![\w'])", alt, text, count=1)


def paraphrase_sentence(sentence: str, n: int, seed: int = 0) -> list[str]:
    """Up to ``n`` distinct template paraphrases of a simple SVO sentence."""
    text = _clean(sentence)
    triplets = extract_triplets(text)
    if not triplets:
        raise SynthError(f"no extractable triplet in {sentence!r}")
    if n <= 0:
        return []
    a0, sense, a1 = triplets[0]
    lemma = next(lem for lem, s in _SENSE_OF.items() if s == sense)
    surface = next(tok for tok in text.split()
                   if tok in _FORM_KIND and _FORM_KIND[tok][0] == lemma)
    kind = _FORM_KIND[surface][1]
    rng = np.random.default_rng(seed)
    synonyms = list(_VERB_SYNONYMS.get(lemma, []))
    if len(synonyms) > 1:
        offset = int(rng.integers(len(synonyms)))
        synonyms = synonyms[offset:] + synonyms[:offset]
    phrases = _applicable_phrases(text)
    adjuncts = list(_ADJUNCTS)
    offset = int(rng.integers(len(adjuncts)))
    adjuncts = adjuncts[offset:] + adjuncts[:offset]

    def verb_variant(i, base_text):
        if i < len(synonyms):
            return _swap_verb(base_text, surface, kind, synonyms[i])
        return None

    def phrase_variant(i, base_text):
        if i < len(phrases):
            return _swap_phrase(base_text, *phrases[i])
        return None

    candidates = [
        verb_variant(0, text),
        verb_variant(1, text),
        _passive(a0, lemma, a1),
        phrase_variant(0, text),
        phrase_variant(1, text),
        phrase_variant(1, verb_variant(0, text)) if verb_variant(0, text) else None,
        (_passive(a0, synonyms[0], a1) if synonyms else None),
        f"{adjuncts[0]} , {text}",
        phrase_variant(0, f"{adjuncts[1]} , {text}"),
        verb_variant(2, text),
        phrase_variant(0, verb_variant(1, text)) if verb_variant(1, text) else None,
        f"{adjuncts[2]} , {text}",
        phrase_variant(0, _passive(a0, lemma, a1)),
        phrase_variant(1, f"{adjuncts[3]} , {text}"),
        f"{adjuncts[4]} , {text}",
    ]
    out: list[str] = []
    for cand in candidates:
        if cand and cand != text and cand not in out:
            out.append(cand)
        if len(out) == n:
            break
    return out


# ---------------------------------------------------------------------------
# event pool
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Narrative:
    event_id: str
    variant: int
    text: str
    triplets: tuple

    @property
    def ref(self) -> str:
        return f"{self.event_id}/{self.variant}"


@dataclass(frozen=True)
class PoolEvent:
    id: str
    date: str
    summary: str
    narratives: tuple


@dataclass
class EventPool:
    reference_events: list
    noise_events: list
    split_date: str = "2020-03-17"

    @property
    def reference_narratives(self) -> list[Narrative]:
        return [n for e in self.reference_events for n in e.narratives]

    @property
    def noise_narratives(self) -> list[Narrative]:
        return [n for e in self.noise_events for n in e.narratives]

    @property
    def noise_fragments(self) -> list[tuple]:
        """(narrative, triplet) units; compound sentences contribute several."""
        return [(n, t) for n in self.noise_narratives for t in n.triplets]

    def narrative_by_ref(self, ref: str) -> Narrative:
        event_id, variant = ref.rsplit("/", 1)
        events = self.reference_events if event_id.startswith("e") else self.noise_events
        for event in events:
            if event.id == event_id:
                return event.narratives[int(variant)]
        raise KeyError(ref)

    def early_events(self) -> list[PoolEvent]:
        return [e for e in self.reference_events if e.date < self.split_date]

    def late_events(self) -> list[PoolEvent]:
        return [e for e in self.reference_events if e.date >= self.split_date]


def load_event_records(path=None, bundled: str | None = None) -> list[tuple[str, str, str]]:
    if path is not None:
        text = open(path, encoding="utf-8").read()
    else:
        text = resources.files("narrshift.data").joinpath(bundled).read_text("utf-8")
    records = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        event_id, date, summary = line.split("\t")
        records.append((event_id, date, summary))
    return records


def build_pool(events_path=None, noise_path=None, paraphrases_per_event: int = 8,
               target_total: int | None = 197, seed: int = 0) -> EventPool:
    """Expand event summaries into a paraphrased reference pool + noise pool.

    Paraphrases are deduplicated and, when ``target_total`` is given, the
    pool is trimmed to exactly that many reference narratives (variants of
    the most-expanded events are dropped last-first; originals are kept).
    """
    ref_records = load_event_records(events_path, "reference_events.tsv")
    noise_records = load_event_records(noise_path, "noise_events.tsv")

    reference_events = []
    for index, (event_id, date, summary) in enumerate(ref_records):
        summary = _clean(summary)
        texts = [summary] + paraphrase_sentence(summary, paraphrases_per_event,
                                                seed=seed * 10007 + index)
        narratives = []
        for variant, text in enumerate(texts):
            triplets = tuple(extract_triplets(text))
            if not triplets:
                raise SynthError(f"event {event_id}: no extractable triplet in {text!r}")
            narratives.append(Narrative(event_id, variant, text, triplets))
        reference_events.append(PoolEvent(event_id, date, summary, tuple(narratives)))

    if target_total is not None:
        total = sum(len(e.narratives) for e in reference_events)
        if total < target_total:
            raise SynthError(f"pool has {total} narratives < target {target_total}")
        while total > target_total:
            sizes = [(len(e.narratives), i) for i, e in enumerate(reference_events)]
            _, i = max(sizes)
            event = reference_events[i]
            if len(event.narratives) <= 1:
                raise SynthError("cannot trim below one narrative per event")
            reference_events[i] = PoolEvent(event.id, event.date, event.summary,
                                            event.narratives[:-1])
            total -= 1

    noise_events = []
    for event_id, date, summary in noise_records:
        summary = _clean(summary)
        triplets = tuple(extract_triplets(summary))
        if not triplets:
            raise SynthError(f"event {event_id}: no extractable triplet in {summary!r}")
        noise_events.append(PoolEvent(event_id, date, summary,
                                      (Narrative(event_id, 0, summary, triplets),)))
    return EventPool(reference_events, noise_events)


# ---------------------------------------------------------------------------
# synthetic runs
# ---------------------------------------------------------------------------

DEFAULT_DAY0 = int(datetime(2020, 2, 1, tzinfo=timezone.utc).timestamp() // DAY_SECONDS)


@dataclass
class SyntheticRun:
    manifest: dict
    docs: list = field(repr=False, default_factory=list)
    triplets: list = field(repr=False, default_factory=list)

    @property
    def change_ts(self) -> float:
        return (self.manifest["day0"] + self.manifest["change_day"]) * DAY_SECONDS

    @property
    def span(self) -> tuple[float, float]:
        day0 = self.manifest["day0"]
        return (day0 * DAY_SECONDS, (day0 + self.manifest["days"]) * DAY_SECONDS)

    def write(self, out_dir) -> None:
        os.makedirs(out_dir, exist_ok=True)
        write_documents(os.path.join(out_dir, "docs.nfv1"), self.docs)
        write_triplets(os.path.join(out_dir, "triplets.nfv1"), self.triplets)
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, sort_keys=True, indent=1)
            fh.write("\n")


def materialize(manifest: dict, pool: EventPool) -> SyntheticRun:
    """Rebuild the exact document/triplet stream described by a manifest."""
    day0 = manifest["day0"]
    docs_per_day = manifest["docs_per_day"]
    docs, triplets = [], []
    for day, slots in enumerate(manifest["slots"]):
        for slot, ref in enumerate(slots):
            narrative = pool.narrative_by_ref(ref)
            kind = manifest["kinds"][day][slot]
            doc_id = f"d{day:02d}s{slot:03d}"
            ts = (day0 + day) * DAY_SECONDS + slot * (DAY_SECONDS / docs_per_day)
            meta = {"kind": kind, "event": narrative.event_id}
            docs.append(Document(id=doc_id, timestamp=ts, text=narrative.text, meta=meta))
            for a0, sense, a1 in narrative.triplets:
                triplets.append(NarrativeTriplet(a0=a0, verb_sense=sense, a1=a1,
                                                 doc_id=doc_id, timestamp=ts, meta=meta))
    return SyntheticRun(manifest=manifest, docs=docs, triplets=triplets)


def _sample_interval_events(pool: EventPool, rng) -> tuple[list, list]:
    early = pool.early_events()
    late = pool.late_events()
    first = [early[i].id for i in sorted(rng.choice(len(early), 3, replace=False))]
    second = [late[i].id for i in sorted(rng.choice(len(late), 3, replace=False))]
    return first, second


def _event_narrative_refs(pool: EventPool, event_ids: list) -> list[str]:
    refs = []
    for event in pool.reference_events:
        if event.id in event_ids:
            refs.extend(n.ref for n in event.narratives)
    return refs


def gen_noise_run(pool: EventPool, noise_ratio: float, seed: int,
                  days: int = 10, docs_per_day: int = 200,
                  change_day: int = 5, day0: int = DEFAULT_DAY0) -> SyntheticRun:
    """One planted change: three events per interval plus shared noise.

    Each day holds ``round(noise_ratio * docs_per_day)`` noise draws and the
    rest reference draws from that interval's three events; the noise pool
    is the same on both sides of the boundary.
    """
    if not 0 <= noise_ratio < 1:
        raise SynthError("noise_ratio must be in [0, 1)")
    rng = np.random.default_rng(seed)
    first, second = _sample_interval_events(pool, rng)
    noise_refs = [n.ref for n in pool.noise_narratives]
    n_noise = int(round(noise_ratio * docs_per_day))
    slots, kinds = [], []
    for day in range(days):
        interval_refs = _event_narrative_refs(pool, first if day < change_day else second)
        day_refs = [interval_refs[i] for i in rng.integers(len(interval_refs), size=docs_per_day - n_noise)]
        day_kinds = ["reference"] * (docs_per_day - n_noise)
        if n_noise:
            day_refs += [noise_refs[i] for i in rng.integers(len(noise_refs), size=n_noise)]
            day_kinds += ["noise"] * n_noise
        position = rng.permutation(docs_per_day)
        slots.append([day_refs[i] for i in position])
        kinds.append([day_kinds[i] for i in position])
    manifest = {
        "kind": "noise_run", "seed": seed, "noise_ratio": noise_ratio,
        "days": days, "docs_per_day": docs_per_day, "change_day": change_day,
        "day0": day0, "interval_events": [first, second],
        "slots": slots, "kinds": kinds,
    }
    return materialize(manifest, pool)


def gen_overlap_run(pool: EventPool, a1: float, a2: float, overlap_days: int,
                    seed: int, days: int = 10, docs_per_day: int = 200,
                    change_day: int = 5, day0: int = DEFAULT_DAY0) -> SyntheticRun:
    """Planted change with one shared event bleeding across the boundary.

    The overlap event (a reference event outside the six interval events)
    fills ``overlap_days`` days on each side of the change point: ratio
    ``a1`` on days [change-overlap_days, change) and ``a2`` on days
    [change, change+overlap_days). With zero ratios the stream is identical
    to the noise-free noise run for the same seed.
    """
    if not (0 <= a1 <= 1 and 0 <= a2 <= 1):
        raise SynthError("overlap ratios must be in [0, 1]")
    if overlap_days > min(change_day, days - change_day) - 1:
        raise SynthError("overlap_days exceeds interval length")
    rng = np.random.default_rng(seed)
    first, second = _sample_interval_events(pool, rng)
    used = set(first) | set(second)
    remaining = [e.id for e in pool.reference_events if e.id not in used]
    overlap_rng = np.random.default_rng((seed, 1))
    overlap_event = remaining[int(overlap_rng.integers(len(remaining)))]
    overlap_refs = _event_narrative_refs(pool, [overlap_event])

    slots, kinds = [], []
    for day in range(days):
        interval_refs = _event_narrative_refs(pool, first if day < change_day else second)
        if change_day - overlap_days <= day < change_day:
            ratio = a1
        elif change_day <= day < change_day + overlap_days:
            ratio = a2
        else:
            ratio = 0.0
        n_overlap = int(round(ratio * docs_per_day))
        day_refs = [interval_refs[i] for i in rng.integers(len(interval_refs), size=docs_per_day - n_overlap)]
        day_kinds = ["reference"] * (docs_per_day - n_overlap)
        if n_overlap:
            # overlap slots cycle the event's narratives (rotated start) so
            # the composition is balanced across the boundary; random draws
            # would leave exploitable per-narrative count skew
            rotation = int(overlap_rng.integers(len(overlap_refs)))
            day_refs += [overlap_refs[(rotation + i) % len(overlap_refs)] for i in range(n_overlap)]
            day_kinds += ["overlap"] * n_overlap
        position = rng.permutation(docs_per_day)
        slots.append([day_refs[i] for i in position])
        kinds.append([day_kinds[i] for i in position])
    manifest = {
        "kind": "overlap_run", "seed": seed, "a1": a1, "a2": a2,
        "overlap_days": overlap_days, "overlap_event": overlap_event,
        "days": days, "docs_per_day": docs_per_day, "change_day": change_day,
        "day0": day0, "interval_events": [first, second],
        "slots": slots, "kinds": kinds,
    }
    return materialize(manifest, pool)


@dataclass(frozen=True)
class LabeledFragment:
    narrative: Narrative
    triplet: tuple
    label: str


def gen_cluster_run(pool: EventPool, n_noise: int, seed: int = 0) -> list[LabeledFragment]:
    """All reference narratives plus ``n_noise`` sampled noise fragments.

    Reference items are labeled by source event; every sampled noise
    fragment is its own singleton label.
    """
    fragments = pool.noise_fragments
    if not 0 <= n_noise <= len(fragments):
        raise SynthError(f"n_noise must be in [0, {len(fragments)}]")
    items = [LabeledFragment(n, n.triplets[0], n.event_id)
             for n in pool.reference_narratives]
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(fragments), n_noise, replace=False)) if n_noise else []
    for i in chosen:
        narrative, triplet = fragments[i]
        items.append(LabeledFragment(narrative, triplet, f"noise:{narrative.event_id}#{i}"))
    return items
