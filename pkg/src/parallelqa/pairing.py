"""Construction pipeline: entity extraction, passage fragmentation, kNN pairing.

News articles are matched to encyclopedia passage fragments by a convex
combination of tf-idf cosine (over pooled corpus statistics) and topic-vector
cosine. Each news article yields at most one pair — its best-scoring fragment —
while one fragment may serve several articles.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import lexmetrics
from .textproc import RawDocument, Token, split_sentences, tokenize
from .topicmodel import TopicModel, TopicVector, infer_topics, topic_cosine

DEFAULT_MAX_WORDS = 500


@dataclass(frozen=True)
class PassageFragment:
    parent_id: str
    fragment_index: int
    text: str
    word_count: int
    # Set only when a single sentence alone exceeds the word budget.
    flagged: bool = False


@dataclass(frozen=True)
class PairingConfig:
    entities_per_article: int = 3
    k_neighbors: int = 5
    tfidf_weight: float = 0.5  # weight on tf-idf; 1 - weight goes to topics
    max_words: int = DEFAULT_MAX_WORDS
    min_score: float = 0.05
    infer_iterations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0.0 <= self.tfidf_weight <= 1.0:
            raise ValueError("tfidf_weight must be in [0, 1]")


@dataclass(frozen=True)
class PassagePairCandidate:
    news_id: str
    wiki_parent_id: str
    wiki_fragment_index: int
    score: float
    tfidf_score: float
    topic_score: float


@dataclass(frozen=True)
class SkippedDoc:
    news_id: str
    reason: str


@dataclass(frozen=True)
class PairingResult:
    pairs: tuple[PassagePairCandidate, ...]
    # Top-k candidate lists per news id, best first.
    candidates: dict[str, tuple[PassagePairCandidate, ...]]
    skipped: tuple[SkippedDoc, ...]


def _capitalized(token: Token) -> bool:
    return token.surface[0].isupper()


def extract_entities(doc: RawDocument, top_n: int) -> list[tuple[str, int]]:
    """Most frequently mentioned entities under a capitalization heuristic.

    An entity is a maximal run of capitalized tokens separated only by
    whitespace within one sentence. Sentence-initial runs count only for
    strings that also occur mid-sentence (they are capitalized positionally).
    Ties rank lexicographically.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    text = doc.text
    tokens = tokenize(text).tokens
    counts: Counter[str] = Counter()
    non_initial: set[str] = set()

    for sent in split_sentences(text):
        sent_tokens = [t for t in tokens if sent.char_start <= t.start < sent.char_end]
        run: list[Token] = []
        run_initial = False
        for i, tok in enumerate(sent_tokens):
            joinable = (
                run
                and _capitalized(tok)
                and text[run[-1].end : tok.start].isspace()
            )
            if joinable:
                run.append(tok)
                continue
            if run:
                name = " ".join(t.surface for t in run)
                counts[name] += 1
                if not run_initial:
                    non_initial.add(name)
            if _capitalized(tok):
                run = [tok]
                run_initial = i == 0
            else:
                run = []
        if run:
            name = " ".join(t.surface for t in run)
            counts[name] += 1
            if not run_initial:
                non_initial.add(name)

    ranked = sorted(
        ((name, counts[name]) for name in non_initial),
        key=lambda item: (-item[1], item[0]),
    )
    return ranked[:top_n]


def fragment(doc: RawDocument, max_words: int = DEFAULT_MAX_WORDS) -> list[PassageFragment]:
    """Greedy packing of whole sentences into fragments of at most max_words.

    A new fragment starts whenever the next sentence would push the running
    count over the budget; a single over-long sentence becomes its own
    flagged fragment, the only case allowed to exceed the budget.
    """
    if max_words < 1:
        raise ValueError("max_words must be >= 1")
    spans = split_sentences(doc.text)
    if not spans:
        return []
    counts = [len(tokenize(doc.text[s.char_start : s.char_end]).tokens) for s in spans]

    fragments: list[PassageFragment] = []
    group: list[int] = []
    group_words = 0

    def flush() -> None:
        nonlocal group, group_words
        if not group:
            return
        start = spans[group[0]].char_start
        end = spans[group[-1]].char_end
        fragments.append(
            PassageFragment(
                parent_id=doc.id,
                fragment_index=len(fragments),
                text=doc.text[start:end],
                word_count=group_words,
                flagged=group_words > max_words,
            )
        )
        group = []
        group_words = 0

    for i, words in enumerate(counts):
        if group and group_words + words > max_words:
            flush()
        group.append(i)
        group_words += words
        if group_words > max_words:
            flush()  # single sentence over budget
    flush()
    return fragments


def pair_passages(
    news: list[RawDocument],
    wiki_pool: list[PassageFragment],
    model: TopicModel,
    config: PairingConfig,
) -> PairingResult:
    """Best-fragment pairing under score = w*tfidf + (1-w)*topic.

    Deterministic for fixed inputs: fragments are scored in pool order, ties
    break on (parent_id, fragment_index), and inference seeds derive from
    config.seed plus the document's position.
    """
    if not wiki_pool:
        raise ValueError("empty wiki pool")

    news_tokens = [tokenize(d.text) for d in news]
    frag_tokens = [tokenize(f.text) for f in wiki_pool]
    stats = lexmetrics.build_corpus_stats(news_tokens + frag_tokens)
    news_tfidf = [lexmetrics.tfidf_vector(t, stats) for t in news_tokens]
    frag_tfidf = [lexmetrics.tfidf_vector(t, stats) for t in frag_tokens]

    def vec(tokens, offset: int) -> TopicVector:
        return infer_topics(model, tokens, iterations=config.infer_iterations, seed=config.seed + offset)

    news_topics = [vec(t, i) for i, t in enumerate(news_tokens)]
    frag_topics = [vec(t, len(news) + j) for j, t in enumerate(frag_tokens)]

    w = config.tfidf_weight
    pairs: list[PassagePairCandidate] = []
    candidates: dict[str, tuple[PassagePairCandidate, ...]] = {}
    skipped: list[SkippedDoc] = []

    for i, doc in enumerate(news):
        scored = []
        for j, frag in enumerate(wiki_pool):
            tfidf_score = lexmetrics.cosine(news_tfidf[i], frag_tfidf[j])
            topic_score = topic_cosine(news_topics[i], frag_topics[j])
            combined = w * tfidf_score + (1 - w) * topic_score
            scored.append(
                PassagePairCandidate(
                    news_id=doc.id,
                    wiki_parent_id=frag.parent_id,
                    wiki_fragment_index=frag.fragment_index,
                    score=combined,
                    tfidf_score=tfidf_score,
                    topic_score=topic_score,
                )
            )
        scored.sort(key=lambda c: (-c.score, c.wiki_parent_id, c.wiki_fragment_index))
        kept = tuple(c for c in scored[: config.k_neighbors] if c.score >= config.min_score)
        candidates[doc.id] = kept
        if kept:
            pairs.append(kept[0])
        else:
            skipped.append(SkippedDoc(news_id=doc.id, reason="no candidate with score >= min_score"))

    return PairingResult(pairs=tuple(pairs), candidates=candidates, skipped=tuple(skipped))
