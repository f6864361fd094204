"""Deterministic synthetic-archive generation with ground truth.

Generates schema-conformant label streams (videos, faces, tokens,
luminance, persons) plus a manifest of what was planted: commercial
spans, interview spans, per-person screen time, word/face co-occurrence
rates. Fixed seed means byte-identical output.

Plants never overlap: each content plan reserves disjoint timeline
windows, and background captions and slot fillers skip reserved ranges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .archive import Person, RawRecords, VideoMeta
from .errors import MalformedInputError
from .ingest import parse_rfc3339

_BG_VOCAB = [f"NEWSWORD{i:03d}" for i in range(80)]
_AD_VOCAB = ["buy", "now", "great", "deal", "call", "today", "save", "more"]


@dataclass(frozen=True)
class CommercialPlan:
    news_len_range: tuple[int, int] = (300_000, 900_000)
    block_len_range: tuple[int, int] = (60_000, 240_000)
    captionless_fraction: float = 0.3
    captionless_len_range: tuple[int, int] = (40_000, 255_000)
    black_len_ms: int = 2000


@dataclass(frozen=True)
class InterviewPlan:
    guest: str = "Guest Person"
    host: str = "Host Person"
    both_ms: int = 39_000
    alone_ms: int = 51_000
    pairs: int = 4
    host_pad_ms: int = 69_000
    per_video: int = 1


@dataclass(frozen=True)
class GenderPlan:
    female_share: float = 0.3
    slot_ms: int = 12_000


@dataclass(frozen=True)
class WordPlant:
    word: str
    count: int
    p_female: float = 0.0
    p_male: float = 0.0


@dataclass(frozen=True)
class PersonWordPlant:
    person: str
    phrase: str
    count: int
    rate: float
    baseline: float


@dataclass(frozen=True)
class ScreenhogPlan:
    presenter: str = "Hog Presenter"
    show: str = "The Hog Show"
    channel: str = "FOX"
    fraction: float = 0.7
    slot_ms: int = 9_000


@dataclass(frozen=True)
class AgePlan:
    channel: str = "CNN"
    # (presenter name, ISO birthdate, share of presenter screen time)
    entries: tuple[tuple[str, str, float], ...] = ()
    slot_ms: int = 9_000


@dataclass(frozen=True)
class HairColorPlan:
    channel: str = "MSNBC"
    # (presenter name, hair color, share of female presenter screen time)
    entries: tuple[tuple[str, str, float], ...] = ()
    slot_ms: int = 9_000


@dataclass(frozen=True)
class SynthSpec:
    videos: int = 4
    video_duration_ms: int = 3_600_000
    channels: tuple[str, ...] = ("CNN",)
    start_air: str = "2017-01-02T06:00:00Z"
    token_period_ms: int = 2500
    sample_period_ms: int = 3000
    luminance_period_ms: int = 500
    background_tokens: bool = True
    commercials: CommercialPlan | None = None
    interviews: InterviewPlan | None = None
    gender: GenderPlan | None = None
    word_plants: tuple[WordPlant, ...] = ()
    person_words: tuple[PersonWordPlant, ...] = ()
    screenhog: ScreenhogPlan | None = None
    ages: AgePlan | None = None
    hair: HairColorPlan | None = None

    def validate(self) -> None:
        if self.videos < 0:
            raise MalformedInputError("videos must be >= 0")
        for plant in self.word_plants:
            if not (0 <= plant.p_female <= 1 and 0 <= plant.p_male <= 1):
                raise MalformedInputError("word plant rates must lie in [0,1]")
        for plant in self.person_words:
            if not (0 <= plant.rate <= 1 and 0 <= plant.baseline <= 1):
                raise MalformedInputError("person-word rates must lie in [0,1]")
        if self.gender and not (0 <= self.gender.female_share <= 1):
            raise MalformedInputError("female_share must lie in [0,1]")
        if self.commercials:
            c = self.commercials
            need = c.news_len_range[0] + c.block_len_range[1] + 2 * c.black_len_ms
            if need >= self.video_duration_ms:
                raise MalformedInputError("commercial plan does not fit in the video length")
        if self.interviews:
            iv = self.interviews
            pattern = iv.pairs * iv.both_ms + (iv.pairs - 1) * iv.alone_ms
            footprint = 600_000 + iv.per_video * (pattern + 2 * iv.host_pad_ms + 300_000)
            if footprint >= self.video_duration_ms:
                raise MalformedInputError("interview pattern does not fit in the video length")


def _age_years_local(birth: date, on: date) -> float:
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


class _Builder:
    def __init__(self, spec: SynthSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.videos: list[VideoMeta] = []
        self.persons: dict[str, Person] = {}
        self.identity_names: list[str] = []
        self.identity_index: dict[str, int] = {}
        self.f_video, self.f_t, self.f_gender = [], [], []
        self.f_identity: list[int] = []
        self.t_video, self.t_t0, self.t_t1, self.t_text = [], [], [], []
        self.l_video, self.l_t, self.l_value = [], [], []
        self.reserved: dict[int, list[tuple[int, int]]] = {}
        self.news_regions: dict[int, list[tuple[int, int]]] = {}
        self.bg_tokens: list[tuple[int, int]] = []  # (video, t0) of background fillers
        self.truth: dict = {}

    # -- structure -----------------------------------------------------

    def add_video(self, channel: str, show: str, air_iso: str, duration_ms: int) -> int:
        vi = len(self.videos)
        self.videos.append(
            VideoMeta(f"video{vi:04d}", channel, show, parse_rfc3339(air_iso), duration_ms)
        )
        self.reserved[vi] = []
        self.news_regions[vi] = [(0, duration_ms)]
        return vi

    def person(self, name: str, gender: str, presenter_on=(), birthdate=None, hair=None) -> int:
        if name not in self.persons:
            self.persons[name] = Person(
                name,
                frozenset(presenter_on),
                gender,
                date.fromisoformat(birthdate) if birthdate else None,
                hair,
            )
        key = name.lower()
        if key not in self.identity_index:
            self.identity_index[key] = len(self.identity_names)
            self.identity_names.append(name)
        return self.identity_index[key]

    def face(self, vi: int, t: int, gender: str, identity: int = -1) -> None:
        self.f_video.append(vi)
        self.f_t.append(t)
        self.f_gender.append(0 if gender == "male" else 1)
        self.f_identity.append(identity)

    def face_block(self, vi: int, start: int, end: int, gender: str, identity: int = -1) -> None:
        """Face events every sample period so [start, end) is covered exactly.

        Block bounds must sit on the sample-period grid, mirroring the
        fixed-rate sampling of real label streams."""
        period = self.spec.sample_period_ms
        if (end - start) % period:
            raise MalformedInputError("face block length must be a multiple of the sample period")
        for t in range(start, end, period):
            self.face(vi, t, gender, identity)

    def token(self, vi: int, t0: int, t1: int, text: str) -> None:
        self.t_video.append(vi)
        self.t_t0.append(t0)
        self.t_t1.append(t1)
        self.t_text.append(text)

    def reserve(self, vi: int, start: int, end: int) -> None:
        self.reserved[vi].append((start, end))

    def reserved_until(self, vi: int, t: int) -> int | None:
        """End of the reserved window containing instant t, if any."""
        for s, e in self.reserved[vi]:
            if s <= t < e:
                return e
        return None

    def overlaps_reserved(self, vi: int, start: int, end: int) -> bool:
        return any(s < end and start < e for s, e in self.reserved[vi])

    # -- background captions --------------------------------------------

    def fill_background_tokens(self) -> None:
        period = self.spec.token_period_ms
        for vi in range(len(self.videos)):
            for rs, re_ in self.news_regions[vi]:
                idx = 0
                t = rs
                while t + 500 <= re_:
                    skip_to = self.reserved_until(vi, t)
                    if skip_to is not None:
                        t = skip_to
                        continue
                    if idx % 8 == 0:
                        # speaker-change delimiter as its own caption token
                        self.token(vi, t, t + 400, ">>")
                    else:
                        self.token(vi, t, t + 400, _BG_VOCAB[idx % len(_BG_VOCAB)])
                        self.bg_tokens.append((vi, t))
                    idx += 1
                    t += period

    def fill_luminance(self, black_spans: dict[int, list[tuple[int, int]]]) -> None:
        period = self.spec.luminance_period_ms
        for vi, meta in enumerate(self.videos):
            spans = sorted(black_spans.get(vi, []))
            k = 0
            for t in range(0, meta.duration_ms, period):
                while k < len(spans) and spans[k][1] <= t:
                    k += 1
                dark = k < len(spans) and spans[k][0] <= t < spans[k][1]
                self.l_video.append(vi)
                self.l_t.append(t)
                self.l_value.append(0.004 if dark else 0.5)

    # -- output ----------------------------------------------------------

    def finish(self) -> RawRecords:
        raw = RawRecords()
        raw.videos = self.videos
        raw.persons = list(self.persons.values())
        raw.identity_names = self.identity_names
        n = len(self.f_video)
        raw.face_video = np.array(self.f_video, dtype=np.int32)
        raw.face_t = np.array(self.f_t, dtype=np.int64)
        raw.face_bbox = np.tile(np.array([0.3, 0.2, 0.6, 0.7], dtype=np.float32), (n, 1))
        raw.face_gender = np.array(self.f_gender, dtype=np.int8)
        raw.face_gender_score = np.full(n, 0.95, dtype=np.float32)
        raw.face_identity = np.array(self.f_identity, dtype=np.int32)
        raw.face_identity_score = np.where(raw.face_identity >= 0, 0.9, 0.0).astype(np.float32)
        raw.face_desc = np.full(n, -1, dtype=np.int32)

        tok_video = np.array(self.t_video, dtype=np.int32)
        order = np.lexsort((np.array(self.t_t0, dtype=np.int64), tok_video))
        raw.tok_video = tok_video[order]
        raw.tok_t0 = np.array(self.t_t0, dtype=np.int64)[order]
        raw.tok_t1 = np.array(self.t_t1, dtype=np.int64)[order]
        raw.tok_texts = [self.t_text[int(i)] for i in order]
        seq = np.zeros(len(order), dtype=np.int64)
        start = 0
        for vi in range(len(self.videos)):
            n_v = int((raw.tok_video == vi).sum())
            seq[start : start + n_v] = np.arange(n_v)
            start += n_v
        raw.tok_seq = seq

        raw.lum_video = np.array(self.l_video, dtype=np.int32)
        raw.lum_t = np.array(self.l_t, dtype=np.int64)
        raw.lum_value = np.array(self.l_value, dtype=np.float32)
        return raw


def _schedule_videos(builder: _Builder, spec: SynthSpec) -> None:
    start = parse_rfc3339(spec.start_air)
    per_channel_count: dict[str, int] = {}
    for vi in range(spec.videos):
        channel = spec.channels[vi % len(spec.channels)]
        k = per_channel_count.get(channel, 0)
        per_channel_count[channel] = k + 1
        air = start + timedelta(milliseconds=k * spec.video_duration_ms)
        show = f"{channel} Report"
        if spec.screenhog and channel == spec.screenhog.channel:
            show = spec.screenhog.show
        builder.add_video(
            channel, show, air.isoformat().replace("+00:00", "Z"), spec.video_duration_ms
        )


def _plant_commercials(builder: _Builder, spec: SynthSpec) -> dict[int, list[tuple[int, int]]]:
    plan = spec.commercials
    rng = builder.rng
    truth: dict[str, list[list[int]]] = {}
    black_spans: dict[int, list[tuple[int, int]]] = {}
    grid = spec.luminance_period_ms

    def on_grid(x: int) -> int:
        return (x // grid) * grid

    for vi, meta in enumerate(builder.videos):
        dur = meta.duration_ms
        news: list[tuple[int, int]] = []
        spans: list[list[int]] = []
        blacks: list[tuple[int, int]] = []
        t = 0
        while True:
            news_len = on_grid(int(rng.integers(*plan.news_len_range)))
            captionless = rng.random() < plan.captionless_fraction
            lo, hi = plan.captionless_len_range if captionless else plan.block_len_range
            block_len = on_grid(int(rng.integers(lo, hi)))
            need = news_len + plan.black_len_ms + block_len + plan.black_len_ms
            if t + need + plan.news_len_range[0] > dur:
                break
            news.append((t, t + news_len))
            b1 = t + news_len
            c0 = b1 + plan.black_len_ms
            c1 = c0 + block_len
            blacks.append((b1, c0))
            blacks.append((c1, c1 + plan.black_len_ms))
            if not captionless:
                tt = c0 + 1000
                i = 0
                while tt + 500 < c1:
                    builder.token(vi, tt, tt + 400, _AD_VOCAB[i % len(_AD_VOCAB)])
                    i += 1
                    tt += spec.token_period_ms
            spans.append([c0, c1])
            t = c1 + plan.black_len_ms
        news.append((t, dur))
        builder.news_regions[vi] = news
        black_spans[vi] = blacks
        truth[meta.id] = spans
    builder.truth["commercials"] = truth
    return black_spans


def _plant_interviews(builder: _Builder, spec: SynthSpec) -> None:
    plan = spec.interviews
    guest = builder.person(plan.guest, "male")
    host = builder.person(plan.host, "female", presenter_on=tuple(spec.channels))
    truth: dict[str, list[list[int]]] = {}
    pattern = plan.pairs * plan.both_ms + (plan.pairs - 1) * plan.alone_ms
    for vi, meta in enumerate(builder.videos):
        spans = []
        for k in range(plan.per_video):
            start = 600_000 + k * (pattern + 2 * plan.host_pad_ms + 300_000)
            builder.reserve(vi, start - plan.host_pad_ms, start + pattern + plan.host_pad_ms)
            builder.face_block(vi, start - plan.host_pad_ms, start, "female", host)
            t = start
            for p in range(plan.pairs):
                builder.face_block(vi, t, t + plan.both_ms, "female", host)
                builder.face_block(vi, t, t + plan.both_ms, "male", guest)
                t += plan.both_ms
                if p < plan.pairs - 1:
                    builder.face_block(vi, t, t + plan.alone_ms, "male", guest)
                    t += plan.alone_ms
            builder.face_block(vi, t, t + plan.host_pad_ms, "female", host)
            spans.append([start, start + pattern])
        truth[meta.id] = spans
    builder.truth["interviews"] = {"guest": plan.guest, "hosts": [plan.host], "spans": truth}


def _plant_gender_slots(builder: _Builder, spec: SynthSpec) -> None:
    plan = spec.gender
    rng = builder.rng
    female_ms = 0
    male_ms = 0
    for vi in range(len(builder.videos)):
        for rs, re_ in builder.news_regions[vi]:
            t = rs
            while t + plan.slot_ms <= re_:
                if builder.overlaps_reserved(vi, t, t + plan.slot_ms):
                    t += plan.slot_ms
                    continue
                gender = "female" if rng.random() < plan.female_share else "male"
                builder.face_block(vi, t, t + plan.slot_ms, gender)
                if gender == "female":
                    female_ms += plan.slot_ms
                else:
                    male_ms += plan.slot_ms
                t += plan.slot_ms
    builder.truth["gender"] = {
        "female_share_planted": plan.female_share,
        "female_ms": female_ms,
        "male_ms": male_ms,
    }


class _Allocator:
    """Hands out disjoint windows inside news regions, round-robin over videos."""

    def __init__(self, builder: _Builder):
        self.builder = builder
        self.cursors = {
            vi: [list(r) for r in regions] for vi, regions in builder.news_regions.items()
        }
        self.order = list(self.cursors)
        self.next_video = 0

    def alloc(self, ms: int) -> tuple[int, int]:
        n = len(self.order)
        for _ in range(n):
            vi = self.order[self.next_video % n]
            self.next_video += 1
            for region in self.cursors[vi]:
                if region[0] + ms <= region[1]:
                    start = region[0]
                    region[0] += ms
                    self.builder.reserve(vi, start, start + ms)
                    return vi, start
        raise MalformedInputError("synth spec does not fit: ran out of timeline")


def _plant_words(builder: _Builder, spec: SynthSpec, alloc: _Allocator) -> None:
    rng = builder.rng
    truth = {}
    for plant in spec.word_plants:
        n_female = 0
        n_male = 0
        for _ in range(plant.count):
            vi, start = alloc.alloc(8000)
            t0 = start + 4000
            builder.token(vi, t0, t0 + 400, plant.word)
            if rng.random() < plant.p_female:
                builder.face(vi, t0 - 1000, "female")
                n_female += 1
            if rng.random() < plant.p_male:
                builder.face(vi, t0 - 1000, "male")
                n_male += 1
        truth[plant.word] = {
            "count": plant.count,
            "p_female": plant.p_female,
            "p_male": plant.p_male,
            "empirical_female": n_female / plant.count if plant.count else 0.0,
            "empirical_male": n_male / plant.count if plant.count else 0.0,
        }
    builder.truth["words"] = truth


def _plant_person_word_utterances(builder: _Builder, spec: SynthSpec, alloc: _Allocator) -> None:
    rng = builder.rng
    truth = {}
    for plant in spec.person_words:
        ident = builder.person(plant.person, "female")
        covered = 0
        words = plant.phrase.split()
        for _ in range(plant.count):
            vi, start = alloc.alloc(8000)
            t = start + 4000
            for w in words:
                builder.token(vi, t, t + 300, w)
                t += 350
            if rng.random() < plant.rate:
                builder.face(vi, start + 3500, "female", ident)
                covered += 1
        truth[plant.phrase] = {
            "person": plant.person,
            "count": plant.count,
            "rate": plant.rate,
            "baseline": plant.baseline,
            "empirical_rate": covered / plant.count if plant.count else 0.0,
        }
    builder.truth["person_words"] = truth


def _plant_person_word_baseline(builder: _Builder, spec: SynthSpec) -> None:
    """Cover a `baseline` fraction of background tokens with the person's face.

    One face per chosen token, positioned so it covers that token and no
    neighbour (token period 2500 ms, face span 3000 ms starting 1000 ms
    before the token).
    """
    rng = builder.rng
    for plant in spec.person_words:
        ident = builder.identity_index[plant.person.lower()]
        n_cov = 0
        for vi, t0 in builder.bg_tokens:
            if rng.random() < plant.baseline:
                builder.face(vi, t0 - 1000, "female", ident)
                n_cov += 1
        builder.truth["person_words"][plant.phrase]["empirical_baseline"] = (
            n_cov / len(builder.bg_tokens) if builder.bg_tokens else 0.0
        )


def _plant_slot_presenters(
    builder: _Builder, spec: SynthSpec, channel: str, entries, slot_ms: int
) -> dict[str, dict[str, int]]:
    """Assign news slots on a channel to presenters by share.

    Returns per-video planted milliseconds: {video_id: {name: ms}}.
    """
    rng = builder.rng
    names = [e[0] for e in entries]
    shares = np.array([e[-1] for e in entries], dtype=np.float64)
    shares = shares / shares.sum()
    idents = [builder.identity_index[n.lower()] for n in names]
    genders = [builder.persons[n].gender for n in names]
    planted: dict[str, dict[str, int]] = {}
    for vi, meta in enumerate(builder.videos):
        if meta.channel != channel:
            continue
        per_video = {n: 0 for n in names}
        for rs, re_ in builder.news_regions[vi]:
            t = rs
            while t + slot_ms <= re_:
                if builder.overlaps_reserved(vi, t, t + slot_ms):
                    t += slot_ms
                    continue
                k = int(rng.choice(len(names), p=shares))
                builder.face_block(vi, t, t + slot_ms, genders[k], idents[k])
                per_video[names[k]] += slot_ms
                t += slot_ms
        planted[meta.id] = per_video
    return planted


def _plant_screenhog(builder: _Builder, spec: SynthSpec) -> None:
    plan = spec.screenhog
    rng = builder.rng
    ident = builder.person(plan.presenter, "male", presenter_on=(plan.channel,))
    planted = 0
    total = 0
    for vi, meta in enumerate(builder.videos):
        if meta.channel != plan.channel or meta.show != plan.show:
            continue
        for rs, re_ in builder.news_regions[vi]:
            total += re_ - rs
            t = rs
            while t + plan.slot_ms <= re_:
                if not builder.overlaps_reserved(vi, t, t + plan.slot_ms) and (
                    rng.random() < plan.fraction
                ):
                    builder.face_block(vi, t, t + plan.slot_ms, "male", ident)
                    planted += plan.slot_ms
                t += plan.slot_ms
    builder.truth["screenhog"] = {
        "presenter": plan.presenter,
        "show": plan.show,
        "fraction": plan.fraction,
        "planted_ms": planted,
        "show_news_ms": total,
        "empirical_fraction": planted / total if total else 0.0,
    }


def _plant_ages(builder: _Builder, spec: SynthSpec) -> None:
    plan = spec.ages
    for name, birth, _share in plan.entries:
        builder.person(name, "male", presenter_on=(plan.channel,), birthdate=birth)
    planted = _plant_slot_presenters(builder, spec, plan.channel, plan.entries, plan.slot_ms)
    births = {name: birth for name, birth, _ in plan.entries}
    expected: dict[str, float] = {}
    num_total = 0.0
    den_total = 0
    for meta in builder.videos:
        if meta.id not in planted:
            continue
        air_day = meta.air_utc.date()
        for name, ms in planted[meta.id].items():
            num_total += ms * _age_years_local(date.fromisoformat(births[name]), air_day)
            den_total += ms
    expected["overall"] = num_total / den_total if den_total else 0.0
    builder.truth["ages"] = {
        "channel": plan.channel,
        "entries": [[n, b, s] for n, b, s in plan.entries],
        "planted_ms_by_video": planted,
        "expected_mean_age": expected["overall"],
    }


def _plant_hair(builder: _Builder, spec: SynthSpec) -> None:
    plan = spec.hair
    for name, color, _share in plan.entries:
        builder.person(name, "female", presenter_on=(plan.channel,), hair=color)
    planted = _plant_slot_presenters(builder, spec, plan.channel, plan.entries, plan.slot_ms)
    by_color: dict[str, int] = {}
    for name, color, _share in plan.entries:
        ms = sum(v.get(name, 0) for v in planted.values())
        by_color[color] = by_color.get(color, 0) + ms
    total = sum(by_color.values())
    builder.truth["hair"] = {
        "channel": plan.channel,
        "planted_ms_by_video": planted,
        "shares": {c: (ms / total if total else 0.0) for c, ms in by_color.items()},
        "planted_shares": {e[1]: e[2] for e in plan.entries},
    }


def generate(seed: int, spec: SynthSpec) -> tuple[RawRecords, dict]:
    """Build records + truth manifest in memory; deterministic per seed."""
    spec.validate()
    rng = np.random.default_rng(seed)
    builder = _Builder(spec, rng)
    _schedule_videos(builder, spec)

    black_spans: dict[int, list[tuple[int, int]]] = {}
    if spec.commercials:
        black_spans = _plant_commercials(builder, spec)
    if spec.interviews:
        _plant_interviews(builder, spec)
    if spec.word_plants or spec.person_words:
        alloc = _Allocator(builder)
        if spec.word_plants:
            _plant_words(builder, spec, alloc)
        if spec.person_words:
            _plant_person_word_utterances(builder, spec, alloc)
    if spec.screenhog:
        _plant_screenhog(builder, spec)
    if spec.ages:
        _plant_ages(builder, spec)
    if spec.hair:
        _plant_hair(builder, spec)
    if spec.gender:
        _plant_gender_slots(builder, spec)

    if spec.background_tokens:
        builder.fill_background_tokens()
    if spec.person_words:
        _plant_person_word_baseline(builder, spec)
    if spec.commercials:
        builder.fill_luminance(black_spans)

    builder.truth["videos"] = {
        "count": len(builder.videos),
        "total_hours": sum(v.duration_ms for v in builder.videos) / 3_600_000,
    }
    return builder.finish(), builder.truth


def write_files(raw: RawRecords, truth: dict, out_dir: str | Path) -> list[str]:
    """Emit records as the schema-conformant file set plus truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    with (out / "videos.jsonl").open("w", encoding="utf-8") as fh:
        for v in raw.videos:
            fh.write(
                json.dumps(
                    {
                        "id": v.id,
                        "channel": v.channel,
                        "show": v.show,
                        "air_utc": v.air_utc.isoformat().replace("+00:00", "Z"),
                        "duration_ms": v.duration_ms,
                    }
                )
                + "\n"
            )
    written.append("videos.jsonl")

    order = np.lexsort((raw.face_t, raw.face_video))
    with (out / "faces.jsonl").open("w", encoding="utf-8") as fh:
        for i in order:
            rec = {
                "video_id": raw.videos[int(raw.face_video[i])].id,
                "t_ms": int(raw.face_t[i]),
                "bbox": [round(float(x), 4) for x in raw.face_bbox[i]],
                "gender": {
                    "label": "male" if raw.face_gender[i] == 0 else "female",
                    "score": round(float(raw.face_gender_score[i]), 4),
                },
            }
            if raw.face_identity[i] >= 0:
                rec["identity"] = {
                    "name": raw.identity_names[int(raw.face_identity[i])],
                    "score": round(float(raw.face_identity_score[i]), 4),
                }
            if raw.face_desc[i] >= 0:
                rec["descriptor_idx"] = int(raw.face_desc[i])
            fh.write(json.dumps(rec) + "\n")
    written.append("faces.jsonl")

    with (out / "tokens.jsonl").open("w", encoding="utf-8") as fh:
        for i in range(len(raw.tok_video)):
            fh.write(
                json.dumps(
                    {
                        "video_id": raw.videos[int(raw.tok_video[i])].id,
                        "seq": int(raw.tok_seq[i]),
                        "text": raw.tok_texts[i],
                        "t0_ms": int(raw.tok_t0[i]),
                        "t1_ms": int(raw.tok_t1[i]),
                    }
                )
                + "\n"
            )
    written.append("tokens.jsonl")

    with (out / "luminance.jsonl").open("w", encoding="utf-8") as fh:
        for i in range(len(raw.lum_video)):
            fh.write(
                json.dumps(
                    {
                        "video_id": raw.videos[int(raw.lum_video[i])].id,
                        "t_ms": int(raw.lum_t[i]),
                        "value": round(float(raw.lum_value[i]), 4),
                    }
                )
                + "\n"
            )
    written.append("luminance.jsonl")

    with (out / "persons.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write("name,presenter_channels,gender,birthdate,hair_color\n")
        for p in raw.persons:
            channels = ";".join(sorted(p.presenter_on))
            birth = p.birthdate.isoformat() if p.birthdate else ""
            fh.write(f"{p.name},{channels},{p.gender or ''},{birth},{p.hair_color or ''}\n")
    written.append("persons.csv")

    if raw.descriptors is not None:
        raw.descriptors.astype("<f4").tofile(out / "descriptors.bin")
        (out / "descriptors.meta").write_text(f"{len(raw.descriptors)}\n")
        written.extend(["descriptors.bin", "descriptors.meta"])

    (out / "truth.json").write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")
    written.append("truth.json")
    return written


def synthesize(seed: int, spec: SynthSpec, out_dir: str | Path) -> dict:
    """Generate and write a synthetic archive; returns the truth manifest."""
    raw, truth = generate(seed, spec)
    write_files(raw, truth, out_dir)
    return truth


def generate_perf_records(
    seed: int,
    *,
    n_videos: int = 5000,
    n_faces: int = 5_000_000,
    n_tokens: int = 50_000_000,
    vocab_size: int = 10_000,
    n_identities: int = 500,
    video_duration_ms: int = 3_600_000,
) -> RawRecords:
    """Large columnar archive for performance testing (no file round trip).

    Token text is synthesized directly as vocabulary ids; only uppercase
    forms exist, so no raw text list is materialized.
    """
    rng = np.random.default_rng(seed)
    raw = RawRecords()
    start = parse_rfc3339("2016-01-01T05:00:00Z")
    channels = ("CNN", "FOX", "MSNBC")
    for vi in range(n_videos):
        channel = channels[vi % 3]
        air = start + timedelta(milliseconds=(vi // 3) * video_duration_ms)
        raw.videos.append(
            VideoMeta(
                f"video{vi:05d}",
                channel,
                f"{channel} Perf Hour",
                air,
                video_duration_ms,
            )
        )

    per_video = n_tokens // n_videos
    n_tokens = per_video * n_videos
    mean_gap = max(2, (video_duration_ms - 1000) // per_video)
    gaps = rng.integers(1, 2 * mean_gap, size=(n_videos, per_video), dtype=np.int16)
    t0 = np.cumsum(gaps, axis=1, dtype=np.int64)
    del gaps
    np.minimum(t0, video_duration_ms - 500, out=t0)
    raw.tok_t0 = t0.ravel().astype(np.int32)
    del t0
    raw.tok_t1 = raw.tok_t0 + 219  # mean spoken-word duration
    raw.tok_video = np.repeat(np.arange(n_videos, dtype=np.int32), per_video)
    raw.tok_seq = np.tile(np.arange(per_video, dtype=np.int32), n_videos)
    raw.tok_id = rng.integers(0, vocab_size, size=n_tokens, dtype=np.int32)
    raw.vocab_list = [f"WORD{i:05d}" for i in range(vocab_size)]
    raw.tok_texts = None
    raw.tok_has_lower = np.zeros(n_tokens, dtype=bool)
    raw.tok_has_arrow = np.zeros(n_tokens, dtype=bool)

    per_video_f = n_faces // n_videos
    n_faces = per_video_f * n_videos
    ft = rng.integers(0, (video_duration_ms - 3000) // 3000, size=(n_videos, per_video_f))
    ft.sort(axis=1)
    raw.face_t = (ft * 3000).ravel().astype(np.int64)
    del ft
    raw.face_video = np.repeat(np.arange(n_videos, dtype=np.int32), per_video_f)
    raw.face_gender = (rng.random(n_faces) < 0.315).astype(np.int8)
    raw.face_gender_score = np.full(n_faces, 0.9, dtype=np.float32)
    ident = rng.integers(-1, n_identities, size=n_faces, dtype=np.int32)
    raw.face_identity = ident
    raw.face_identity_score = np.where(ident >= 0, 0.9, 0.0).astype(np.float32)
    raw.face_desc = np.full(n_faces, -1, dtype=np.int32)
    raw.face_bbox = np.zeros((0, 4), dtype=np.float32)
    raw.identity_names = [f"Person {i:04d}" for i in range(n_identities)]
    return raw
