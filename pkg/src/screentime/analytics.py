"""Archive-level studies: who is on screen when words are said, mention
and country counting with exclusion rules, event-coverage decay, and
presenter statistics (screenhog, screen-time-weighted age, group shares).

All computations run on news content (video minus detected commercials)
and skip videos whose commercial mask is unknown; face-overlap tests
treat an utterance as covered when any face interval of the class
overlaps the utterance's own token span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .archive import Archive, Flat, empty_flat, flat_intersect, flat_union
from .engine import Engine, day_to_date, roll_up_days
from .errors import MalformedInputError


def age_years(birth: date, on: date) -> float:
    """Age in years at day granularity: whole years plus the fraction of
    the current birthday-to-birthday span elapsed."""
    years = on.year - birth.year
    this_birthday = _safe_birthday(birth, on.year)
    if this_birthday > on:
        years -= 1
        last = _safe_birthday(birth, on.year - 1)
        nxt = this_birthday
    else:
        last = this_birthday
        nxt = _safe_birthday(birth, on.year + 1)
    return years + (on - last).days / (nxt - last).days


def _safe_birthday(birth: date, year: int) -> date:
    try:
        return birth.replace(year=year)
    except ValueError:  # Feb 29
        return date(year, 3, 1)


@dataclass(frozen=True)
class WordAssociation:
    word: str
    count: int
    p_female: float
    p_male: float

    @property
    def diff(self) -> float:
        return self.p_female - self.p_male


@dataclass(frozen=True)
class MentionRule:
    name: str
    target: tuple[str, ...]
    honorifics: tuple[tuple[str, ...], ...] = ()
    excluded_prev: tuple[str, ...] = ()
    excluded_next: tuple[str, ...] = ()
    excluded_first_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.target:
            raise MalformedInputError("mention rule target must be non-empty")


@dataclass(frozen=True)
class CountryLexicon:
    # alias token tuple -> canonical country
    aliases: dict
    # alias token tuple -> excluded preceding tokens
    exclude_prev: dict = field(default_factory=dict)
    omitted: frozenset = frozenset()


@dataclass(frozen=True)
class NewsEvent:
    day: date
    category: str
    name: str
    terms: tuple[str, ...]


HONORIFIC, BARE, EXCLUDED = 0, 1, 2


# ----------------------------------------------------------------------
# shared utterance machinery


class _Study:
    """Cached per-archive token/face overlap state shared by the studies."""

    def __init__(self, archive: Archive):
        self.archive = archive
        self.engine = Engine(archive)
        self._token_state = None

    def token_state(self):
        """(in_news bool, global t0, global t1) for every token."""
        if self._token_state is None:
            ar = self.archive
            g0 = ar.origin[ar.tok_video] + ar.tok_t0
            g1 = ar.origin[ar.tok_video] + ar.tok_t1
            in_news = overlaps_flat(ar.news_flat, g0, g1)
            self._token_state = (in_news, g0, g1)
        return self._token_state


def overlaps_flat(flat: Flat, g0: np.ndarray, g1: np.ndarray) -> np.ndarray:
    """Whether each [g0, g1) span overlaps the canonical flat set."""
    if not len(flat.starts) or not len(g0):
        return np.zeros(len(g0), dtype=bool)
    idx = np.searchsorted(flat.starts, g1, side="left")
    return (idx > 0) & (flat.ends[np.maximum(idx - 1, 0)] > g0)


def _identity_flat(archive: Archive, person: str) -> Flat:
    ident = archive.identity_id(person)
    if ident is None or ident not in archive.identity_flat:
        return empty_flat()
    return archive.identity_flat[ident]


# ----------------------------------------------------------------------
# word <-> face association


def word_gender_association(
    archive: Archive,
    min_count: int = 100,
    top_fraction: float = 0.10,
    stopwords: frozenset = frozenset(),
    name_denylist: frozenset = frozenset(),
) -> list[WordAssociation]:
    """Per-word conditional probabilities of a female/male face on screen,
    ranked by the female-male difference.

    Words below min_count, stop words, denylisted names, and words outside
    the top `top_fraction` by frequency are dropped.
    """
    study = _Study(archive)
    in_news, g0, g1 = study.token_state()
    ar = archive
    n_vocab = len(ar.vocab_list)
    if n_vocab == 0:
        return []
    f_cover = overlaps_flat(ar.gender_flat["female"], g0, g1) & in_news
    m_cover = overlaps_flat(ar.gender_flat["male"], g0, g1) & in_news
    counts = np.bincount(ar.tok_id[in_news], minlength=n_vocab)
    f_counts = np.bincount(ar.tok_id[f_cover], minlength=n_vocab)
    m_counts = np.bincount(ar.tok_id[m_cover], minlength=n_vocab)

    keep = counts >= min_count
    for wid in np.flatnonzero(keep).tolist():
        word = ar.vocab_list[wid]
        if word in stopwords or word in name_denylist:
            keep[wid] = False
    kept_ids = np.flatnonzero(keep)
    if not len(kept_ids):
        return []
    if top_fraction < 1.0:
        n_top = max(1, int(round(len(kept_ids) * top_fraction)))
        order = np.argsort(counts[kept_ids], kind="stable")[::-1]
        kept_ids = kept_ids[order[:n_top]]
    out = [
        WordAssociation(
            ar.vocab_list[int(w)],
            int(counts[w]),
            float(f_counts[w] / counts[w]),
            float(m_counts[w] / counts[w]),
        )
        for w in kept_ids
    ]
    out.sort(key=lambda a: (-a.diff, a.word))
    return out


def gender_baseline(archive: Archive) -> tuple[float, float]:
    """Archive-wide Pr[female face | any token] and Pr[male face | any token]."""
    study = _Study(archive)
    in_news, g0, g1 = study.token_state()
    total = int(in_news.sum())
    if total == 0:
        return 0.0, 0.0
    f = int((overlaps_flat(archive.gender_flat["female"], g0, g1) & in_news).sum())
    m = int((overlaps_flat(archive.gender_flat["male"], g0, g1) & in_news).sum())
    return f / total, m / total


def unique_words(
    archive: Archive, person: str, min_count: int = 100, threshold: float = 0.5
) -> list[tuple[str, float, int]]:
    """Words whose conditional probability of the person being on screen
    exceeds the threshold; (word, probability, count), sorted by probability."""
    flat = _identity_flat(archive, person)
    if not len(flat.starts):
        return []
    study = _Study(archive)
    in_news, g0, g1 = study.token_state()
    cover = overlaps_flat(flat, g0, g1) & in_news
    n_vocab = len(archive.vocab_list)
    counts = np.bincount(archive.tok_id[in_news], minlength=n_vocab)
    c_counts = np.bincount(archive.tok_id[cover], minlength=n_vocab)
    ids = np.flatnonzero(counts >= min_count)
    out = []
    for wid in ids.tolist():
        p = c_counts[wid] / counts[wid]
        if p > threshold:
            out.append((archive.vocab_list[wid], float(p), int(counts[wid])))
    out.sort(key=lambda t: (-t[1], t[0]))
    return out


# ----------------------------------------------------------------------
# mention counting


def classify_mentions(archive: Archive, rule: MentionRule):
    """Classify every occurrence of the rule target in the token stream.

    Returns (positions, classes, days): global token positions of the
    occurrence start, HONORIFIC/BARE/EXCLUDED codes, and the epoch day
    of each occurrence.
    """
    ar = archive
    engine = Engine(ar)
    phrase = " ".join(rule.target)
    pos = engine.phrase_positions(phrase)
    n = len(rule.target)
    if not len(pos):
        return pos, np.empty(0, dtype=np.int8), np.empty(0, dtype=np.int64)
    vids = np.searchsorted(ar.tok_offsets, pos, side="right") - 1
    video_lo = ar.tok_offsets[vids]
    video_hi = ar.tok_offsets[vids + 1]
    n_tok = len(ar.tok_id)

    def ids_at(offset: np.ndarray) -> np.ndarray:
        """Token ids at pos+offset, or -1 outside the occurrence's video."""
        at = pos + offset
        ok = (at >= video_lo) & (at < video_hi)
        safe = np.clip(at, 0, n_tok - 1)
        out = ar.tok_id[safe].astype(np.int64)
        out[~ok] = -1
        return out

    def vocab_ids(words) -> set[int]:
        found = {ar.vocab.get(w.upper()) for w in words}
        return {i for i in found if i is not None}

    honorific = np.zeros(len(pos), dtype=bool)
    for prefix in rule.honorifics:
        hit = np.ones(len(pos), dtype=bool)
        for k, word in enumerate(reversed(prefix), start=1):
            wid = ar.vocab.get(word.upper())
            if wid is None:
                hit[:] = False
                break
            hit &= ids_at(np.int64(-k)) == wid
        honorific |= hit

    prev_ids = ids_at(np.int64(-1))
    next_ids = ids_at(np.int64(n))
    excluded_prev = vocab_ids(rule.excluded_prev) | vocab_ids(rule.excluded_first_names)
    excluded_next = vocab_ids(rule.excluded_next)
    excluded = np.isin(prev_ids, list(excluded_prev)) if excluded_prev else np.zeros(len(pos), bool)
    if excluded_next:
        excluded |= np.isin(next_ids, list(excluded_next))

    classes = np.full(len(pos), BARE, dtype=np.int8)
    classes[excluded] = EXCLUDED
    classes[honorific] = HONORIFIC

    g0 = ar.origin[vids] + ar.tok_t0[pos]
    from .archive import DAY_MS

    days = ar.day_of_slot[g0 // DAY_MS]
    return pos, classes, days


def mention_counts(archive: Archive, rule: MentionRule, bucket: str = "month") -> dict:
    """Per-bucket {honorific, bare, excluded} counts for the rule target."""
    _, classes, days = classify_mentions(archive, rule)
    out: dict = {}
    if not len(classes):
        return out
    names = {HONORIFIC: "honorific", BARE: "bare", EXCLUDED: "excluded"}
    for code, label in names.items():
        sel = classes == code
        if not sel.any():
            continue
        d = days[sel]
        day_min = int(d.min())
        acc = np.bincount(d - day_min)
        nz = np.flatnonzero(acc)
        dates, values = roll_up_days(nz + day_min, acc[nz].astype(np.int64), bucket)
        for bucket_date, v in zip(dates, values.tolist()):
            if v:
                out.setdefault(bucket_date.isoformat(), {"honorific": 0, "bare": 0, "excluded": 0})[
                    label
                ] = int(v)
    return out


# ----------------------------------------------------------------------
# country counting


def country_mentions(archive: Archive, lexicon: CountryLexicon, bucket: str = "month") -> dict:
    """Longest-alias-first country counts, with exclusion rules applied.

    Returns {country: {"total": n, "buckets": {iso date: n}}}.
    """
    ar = archive
    engine = Engine(ar)
    matches = []  # (position, -length, country)
    for alias, country in lexicon.aliases.items():
        if country in lexicon.omitted:
            continue
        phrase = " ".join(alias)
        pos = engine.phrase_positions(phrase)
        if not len(pos):
            continue
        banned = lexicon.exclude_prev.get(alias, ())
        if banned:
            banned_ids = [ar.vocab[w.upper()] for w in banned if w.upper() in ar.vocab]
            if banned_ids:
                vids = np.searchsorted(ar.tok_offsets, pos, side="right") - 1
                lo = ar.tok_offsets[vids]
                prev_ok = pos - 1 >= lo
                prev = ar.tok_id[np.maximum(pos - 1, 0)]
                drop = prev_ok & np.isin(prev, banned_ids)
                pos = pos[~drop]
        for p in pos.tolist():
            matches.append((p, -len(alias), country))
    matches.sort()
    from .archive import DAY_MS

    out: dict = {}
    next_free = -1
    for p, neg_len, country in matches:
        if p < next_free:
            continue
        next_free = p - neg_len
        vid = int(np.searchsorted(ar.tok_offsets, p, side="right")) - 1
        g0 = int(ar.origin[vid] + ar.tok_t0[p])
        day = int(ar.day_of_slot[g0 // DAY_MS])
        bucket_date = roll_up_days(
            np.array([day], dtype=np.int64), np.array([1], dtype=np.int64), bucket
        )[0][0].isoformat()
        entry = out.setdefault(country, {"total": 0, "buckets": {}})
        entry["total"] += 1
        entry["buckets"][bucket_date] = entry["buckets"].get(bucket_date, 0) + 1
    return out


# ----------------------------------------------------------------------
# event coverage


def event_coverage(
    archive: Archive, events: list[NewsEvent], window_days: int = 60
) -> dict:
    """Daily term counts for each event, days 0..window inclusive,
    truncated at the next event of the same category."""
    engine = Engine(archive)
    by_category: dict[str, list[NewsEvent]] = {}
    for ev in events:
        by_category.setdefault(ev.category, []).append(ev)
    for evs in by_category.values():
        evs.sort(key=lambda e: e.day)
    out: dict = {}
    from .engine import date_to_day

    for category, evs in by_category.items():
        for i, ev in enumerate(evs):
            start_day = date_to_day(ev.day)
            end_day = start_day + window_days + 1
            if i + 1 < len(evs):
                end_day = min(end_day, date_to_day(evs[i + 1].day))
            n_days = max(0, end_day - start_day)
            counts = np.zeros(n_days, dtype=np.int64)
            for term in ev.terms:
                _, starts, _ends = engine.phrase_intervals(term)
                if not len(starts):
                    continue
                from .archive import DAY_MS

                days = archive.day_of_slot[starts // DAY_MS] - start_day
                sel = (days >= 0) & (days < n_days)
                if sel.any():
                    counts += np.bincount(days[sel], minlength=n_days)
            out[ev.name] = {
                "category": category,
                "start": ev.day.isoformat(),
                "days": n_days,
                "counts": counts.tolist(),
            }
    return out


# ----------------------------------------------------------------------
# presenter statistics


@dataclass(frozen=True)
class ScreenhogScore:
    presenter: str
    show: str
    fraction: float
    show_news_hours: float
    eligible: bool


def screenhog(
    archive: Archive, presenter: str, show: str, min_show_hours: float = 100.0
) -> ScreenhogScore:
    """Fraction of the show's news content during which its presenter is
    on screen; shows below min_show_hours of news content are ineligible."""
    engine = Engine(archive)
    show_spans = engine._meta_spans("show", show)
    show_news = flat_intersect(show_spans, archive.news_flat)
    news_ms = show_news.total_ms
    hours = news_ms / 3_600_000
    on = flat_intersect(_identity_flat(archive, presenter), show_news)
    fraction = on.total_ms / news_ms if news_ms else 0.0
    return ScreenhogScore(presenter, show, fraction, hours, hours >= min_show_hours)


def weighted_age(archive: Archive, channel: str, bucket: str = "year") -> dict:
    """Screen-time-weighted mean presenter age per bucket (years).

    Each presenter-second contributes the presenter's age on the video's
    air date; contributions bucket by air date.
    """
    from .engine import bucket_start_day, date_to_day

    ar = archive
    num: dict[str, float] = {}
    den: dict[str, int] = {}
    for p in ar.persons:
        if channel not in p.presenter_on or p.birthdate is None:
            continue
        flat = flat_intersect(_identity_flat(ar, p.name), ar.news_flat)
        if not len(flat.starts):
            continue
        vids = ar.video_of_global(flat.starts)
        lengths = flat.ends - flat.starts
        for vi in np.unique(vids).tolist():
            meta = ar.videos[vi]
            if meta.channel != channel:
                continue
            ms = int(lengths[vids == vi].sum())
            air_day = meta.air_utc.date()
            if bucket == "day":
                key_day = date_to_day(air_day)
            elif bucket == "week":
                key_day = ((date_to_day(air_day) - 4) // 7) * 7 + 4
            else:
                key_day = bucket_start_day(bucket, date_to_day(air_day))
            key = day_to_date(key_day).isoformat()
            age = age_years(p.birthdate, air_day)
            num[key] = num.get(key, 0.0) + ms * age
            den[key] = den.get(key, 0) + ms
    return {k: num[k] / den[k] for k in sorted(num) if den[k]}


def group_share(
    archive: Archive,
    group_of: dict,
    domain: list[str],
    bucket: str = "year",
) -> dict:
    """Share of the domain's union screen time covered by each group's
    union screen time, per bucket plus overall."""
    engine = Engine(archive)
    domain_flat = empty_flat()
    group_flats: dict[str, Flat] = {}
    for person in domain:
        flat = flat_intersect(_identity_flat(archive, person), archive.news_flat)
        domain_flat = flat_union(domain_flat, flat)
        group = group_of.get(person)
        if group is None:
            continue
        group_flats[group] = flat_union(group_flats.get(group, empty_flat()), flat)
    dom_days, dom_ms = engine.day_series(domain_flat)
    dom_dates, dom_values = (
        roll_up_days(dom_days, dom_ms, bucket) if len(dom_days) else ([], np.empty(0))
    )
    dom_map = {d.isoformat(): int(v) for d, v in zip(dom_dates, dom_values)}
    out: dict = {"overall": {}, "buckets": {}}
    dom_total = domain_flat.total_ms
    for group, flat in sorted(group_flats.items()):
        out["overall"][group] = flat.total_ms / dom_total if dom_total else 0.0
        days, ms = engine.day_series(flat)
        if not len(days):
            continue
        dates, values = roll_up_days(days, ms, bucket)
        shares = {}
        for d, v in zip(dates, values.tolist()):
            denom = dom_map.get(d.isoformat())
            if denom:
                shares[d.isoformat()] = int(v) / denom
        out["buckets"][group] = shares
    return out


# ----------------------------------------------------------------------
# person <-> word association


def person_word_association(
    archive: Archive, person: str, phrases: list[str], bucket: str = "month"
) -> dict:
    """Fraction of phrase utterances with the person on screen, per bucket,
    plus the baseline Pr[person on screen | arbitrary token]."""
    if not phrases:
        raise MalformedInputError("phrases must be non-empty")
    from .archive import DAY_MS

    ar = archive
    engine = Engine(ar)
    study = _Study(ar)
    flat = _identity_flat(ar, person)
    utt_days: list[np.ndarray] = []
    utt_cov: list[np.ndarray] = []
    for phrase in phrases:
        _, g0, g1 = engine.phrase_intervals(phrase)
        if not len(g0):
            continue
        in_news = overlaps_flat(ar.news_flat, g0, g1)
        g0, g1 = g0[in_news], g1[in_news]
        utt_days.append(ar.day_of_slot[g0 // DAY_MS])
        utt_cov.append(overlaps_flat(flat, g0, g1))
    in_news_all, t_g0, t_g1 = study.token_state()
    base_cov = overlaps_flat(flat, t_g0, t_g1) & in_news_all
    baseline = int(base_cov.sum()) / int(in_news_all.sum()) if in_news_all.any() else 0.0
    if not utt_days:
        return {"baseline": baseline, "overall": 0.0, "count": 0, "buckets": {}}
    days = np.concatenate(utt_days)
    cov = np.concatenate(utt_cov)
    day_min = int(days.min())
    totals = np.bincount(days - day_min)
    covered = np.bincount((days - day_min)[cov], minlength=len(totals))
    nz = np.flatnonzero(totals)
    dates_t, values_t = roll_up_days(nz + day_min, totals[nz].astype(np.int64), bucket)
    _, values_c = roll_up_days(nz + day_min, covered[nz].astype(np.int64), bucket)
    buckets = {
        d.isoformat(): (int(c) / int(t) if t else 0.0)
        for d, t, c in zip(dates_t, values_t.tolist(), values_c.tolist())
    }
    return {
        "baseline": baseline,
        "overall": int(cov.sum()) / len(cov),
        "count": int(len(cov)),
        "buckets": buckets,
    }


# ----------------------------------------------------------------------
# honorific scatter


def honorific_scatter(
    archive: Archive,
    presenters: list[str],
    rule_a: MentionRule,
    rule_b: MentionRule,
    on_screen: bool = True,
    min_mentions: int = 100,
) -> dict:
    """Per-presenter honorific fractions under two rules; presenters with
    fewer than min_mentions person-referring mentions on either axis are
    omitted. Returns {presenter: (x, y)}."""
    ar = archive
    axes = []
    for rule in (rule_a, rule_b):
        pos, classes, _days = classify_mentions(ar, rule)
        n = len(rule.target)
        if len(pos):
            vids = np.searchsorted(ar.tok_offsets, pos, side="right") - 1
            g0 = ar.origin[vids] + ar.tok_t0[pos]
            g1 = ar.origin[vids] + ar.tok_t1[np.minimum(pos + n - 1, len(ar.tok_id) - 1)]
            g1 = np.maximum(g1, g0)
        else:
            g0 = g1 = np.empty(0, dtype=np.int64)
        axes.append((classes, g0, g1))
    out: dict = {}
    for presenter in presenters:
        flat = _identity_flat(ar, presenter)
        fractions = []
        for classes, g0, g1 in axes:
            if on_screen:
                sel = overlaps_flat(flat, g0, g1)
            else:
                sel = np.ones(len(g0), dtype=bool)
            c = classes[sel]
            honorific = int((c == HONORIFIC).sum())
            bare = int((c == BARE).sum())
            person_refs = honorific + bare
            if person_refs < min_mentions:
                fractions = None
                break
            fractions.append(honorific / person_refs)
        if fractions is not None:
            out[presenter] = (fractions[0], fractions[1])
    return out
