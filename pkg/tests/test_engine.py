"""Query engine: leaf semantics, Boolean consistency, aggregation, clips."""

import numpy as np
import pytest

from screentime.archive import Archive, RawRecords, VideoMeta
from screentime.engine import Engine
from screentime.errors import MalformedInputError
from screentime.ingest import parse_rfc3339
from screentime.intervals import IntervalSet
from screentime.qlang import AndGroup, Filter, Query, parse

from boolean_oracle import OracleArchive, mask_pairs

VOCAB = ["ALPHA", "BETA", "GAMMA", "DELTA", "OMEGA"]


def random_raw(rng, n_videos=4, captionless_last=True):
    from screentime.archive import Person

    raw = RawRecords()
    raw.persons = [
        Person("Anna Host", frozenset({"CNN"}), "female"),
        Person("Bob Guest", frozenset(), "male"),
    ]
    raw.identity_names = ["Anna Host", "Bob Guest"]
    airs = ["2017-03-01T05:30:00Z", "2017-03-01T23:52:00Z", "2017-03-02T12:00:00Z",
            "2017-03-03T01:10:00Z", "2017-03-03T18:45:00Z"]
    f_video, f_t, f_gender, f_ident = [], [], [], []
    t_video, t_seq, t_t0, t_t1, t_text = [], [], [], [], []
    for vi in range(n_videos):
        raw.videos.append(
            VideoMeta(
                f"v{vi}",
                ("CNN", "FOX")[vi % 2],
                ("Show A", "Show B")[vi % 2],
                parse_rfc3339(airs[vi % len(airs)]),
                600_000,
            )
        )
        n_faces = int(rng.integers(0, 40))
        for t in sorted(rng.integers(0, 59700, size=n_faces).tolist()):
            f_video.append(vi)
            f_t.append(t * 10)
            f_gender.append(int(rng.integers(0, 2)))
            f_ident.append(int(rng.integers(-1, 2)))
        if captionless_last and vi == n_videos - 1:
            continue
        n_toks = int(rng.integers(0, 60))
        times = np.unique(rng.integers(0, 29900, size=n_toks)) * 20
        for k, t0 in enumerate(times.tolist()):
            t_video.append(vi)
            t_seq.append(k)
            t_t0.append(t0)
            t_t1.append(t0 + 200)
            t_text.append(str(rng.choice(VOCAB)))
    raw.face_video = np.array(f_video, dtype=np.int32)
    raw.face_t = np.array(f_t, dtype=np.int64)
    n = len(f_video)
    raw.face_bbox = np.tile(np.array([0.1, 0.1, 0.4, 0.5], np.float32), (n, 1))
    raw.face_gender = np.array(f_gender, dtype=np.int8)
    raw.face_gender_score = np.ones(n, dtype=np.float32)
    raw.face_identity = np.array(f_ident, dtype=np.int32)
    raw.face_identity_score = np.ones(n, dtype=np.float32)
    raw.face_desc = np.full(n, -1, dtype=np.int32)
    raw.tok_video = np.array(t_video, dtype=np.int32)
    raw.tok_seq = np.array(t_seq, dtype=np.int64)
    raw.tok_t0 = np.array(t_t0, dtype=np.int64)
    raw.tok_t1 = np.array(t_t1, dtype=np.int64)
    raw.tok_texts = t_text
    return raw


def random_query(rng) -> Query:
    def leaf():
        kind = rng.integers(0, 7)
        if kind == 0:
            return Filter("tag", str(rng.choice(["male", "female", "presenter"])))
        if kind == 1:
            return Filter("name", str(rng.choice(["Anna Host", "BOB GUEST", "Missing Person"])))
        if kind == 2:
            phrase = " ".join(
                rng.choice(VOCAB, size=rng.integers(1, 3)).tolist()
            )
            if rng.random() < 0.3:
                phrase += ", " + str(rng.choice(VOCAB))
            return Filter("text", phrase)
        if kind == 3:
            return Filter("channel", str(rng.choice(["CNN", "FOX", "cnn,fox", "MSNBC"])))
        if kind == 4:
            return Filter("show", str(rng.choice(["Show A", "show b"])))
        if kind == 5:
            return Filter("hour", str(rng.choice(["0-6", "22-2", "13", "5-24"])))
        return Filter("commercials", str(rng.choice(["include", "exclude"])))

    groups = []
    for _ in range(int(rng.integers(1, 4))):
        filters = [leaf() for _ in range(int(rng.integers(1, 4)))]
        if any(f.key == "text" for f in filters) and rng.random() < 0.4:
            filters.append(Filter("textwindow", str(rng.choice(["1", "2", "3.5"]))))
        groups.append(AndGroup(tuple(filters)))
    return Query(tuple(groups))


@pytest.fixture(scope="module")
def oracle_pair():
    rng = np.random.default_rng(61)
    raw = random_raw(rng)
    archive = Archive.build(raw, detect_commercial_masks=False)
    return Engine(archive), OracleArchive(raw), raw


def test_random_queries_match_boolean_oracle(oracle_pair):
    engine, oracle, raw = oracle_pair
    rng = np.random.default_rng(67)
    for _ in range(150):
        query = random_query(rng)
        got = {
            vid: s.pairs() for vid, s in engine.evaluate_by_video(query).items()
        }
        want = {}
        for vi, mask in enumerate(oracle.eval_query(query)):
            pairs = mask_pairs(mask)
            if pairs:
                want[raw.videos[vi].id] = pairs
        assert got == want, query.unparse()


def random_interval_filter(rng) -> Filter:
    """A random interval-producing leaf (the commercials flag and
    textwindow are masking/widening modifiers, not set-producing
    filters, so Boolean-consistency is stated without them)."""
    while True:
        q = random_query(rng)
        f = q.groups[0].filters[0]
        if f.key not in ("commercials", "textwindow"):
            return f


def test_boolean_consistency(oracle_pair):
    engine, _, raw = oracle_pair
    rng = np.random.default_rng(71)
    vids = [v.id for v in raw.videos]
    for _ in range(100):
        fa = random_interval_filter(rng)
        fb = random_interval_filter(rng)
        and_query = Query((AndGroup((fa, fb)),))
        or_query = Query((AndGroup((fa,)), AndGroup((fb,))))
        ev_a = engine.evaluate_by_video(Query((AndGroup((fa,)),)))
        ev_b = engine.evaluate_by_video(Query((AndGroup((fb,)),)))
        ev_and = engine.evaluate_by_video(and_query)
        ev_or = engine.evaluate_by_video(or_query)
        for vid in vids:
            a = ev_a.get(vid, IntervalSet.empty(vid))
            b = ev_b.get(vid, IntervalSet.empty(vid))
            got_and = ev_and.get(vid, IntervalSet.empty(vid))
            got_or = ev_or.get(vid, IntervalSet.empty(vid))
            assert got_and == a.intersect(b)
            assert got_or == a.union(b)


def test_unknown_name_warns_and_empty(oracle_pair):
    engine, _, _ = oracle_pair
    res = engine.evaluate('name="Nobody At All"')
    assert len(res.flat.starts) == 0
    assert any("Nobody At All" in w for w in res.warnings)


def test_wrong_channel_empty(oracle_pair):
    engine, _, _ = oracle_pair
    assert engine.evaluate_by_video('channel="MSNBC"') == {}


def test_captionless_video_excluded_unless_included(oracle_pair):
    engine, _, raw = oracle_pair
    last = raw.videos[-1].id
    masked = engine.evaluate_by_video(f'channel="{raw.videos[-1].channel}"')
    assert last not in masked
    included = engine.evaluate_by_video(
        f'channel="{raw.videos[-1].channel}" AND commercials="include"'
    )
    assert included[last].pairs() == [(0, 600_000)]


# ----------------------------------------------------------------------
# textwindow arithmetic


def textwindow_archive():
    raw = RawRecords()
    raw.videos = [VideoMeta("v", "CNN", "S", parse_rfc3339("2017-01-01T00:00:00Z"), 600_000)]
    raw.tok_video = np.array([0], dtype=np.int32)
    raw.tok_seq = np.array([0], dtype=np.int64)
    raw.tok_t0 = np.array([1000], dtype=np.int64)
    raw.tok_t1 = np.array([1200], dtype=np.int64)
    raw.tok_texts = ["THE"]
    return Archive.build(raw, detect_commercial_masks=False)


def test_textwindow_centered_on_match():
    engine = Engine(textwindow_archive())
    out = engine.evaluate_by_video('text="THE" AND textwindow="2"')
    # 2 s window centered on the midpoint (1100 ms) of [1000, 1200)
    assert out["v"].pairs() == [(100, 2100)]


def test_text_without_window_is_token_span():
    engine = Engine(textwindow_archive())
    out = engine.evaluate_by_video('text="the"')
    assert out["v"].pairs() == [(1000, 1200)]


# ----------------------------------------------------------------------
# aggregation


def month_boundary_engine():
    raw = RawRecords()
    raw.videos = [
        VideoMeta("v", "CNN", "S", parse_rfc3339("2017-01-31T23:59:30Z"), 90_000)
    ]
    raw.tok_video = np.array([0], dtype=np.int32)
    raw.tok_seq = np.array([0], dtype=np.int64)
    raw.tok_t0 = np.array([0], dtype=np.int64)
    raw.tok_t1 = np.array([100], dtype=np.int64)
    raw.tok_texts = [">> X"]
    return Engine(Archive.build(raw, detect_commercial_masks=False))


def test_aggregate_splits_at_month_boundary():
    engine = month_boundary_engine()
    series, _ = engine.run('channel="CNN"', bucket="month")
    assert [d.isoformat() for d in series.dates] == ["2017-01-01", "2017-02-01"]
    assert series.values_ms.tolist() == [30_000, 60_000]


def test_aggregate_day_and_week_buckets():
    engine = month_boundary_engine()
    day, _ = engine.run('channel="CNN"', bucket="day")
    assert [d.isoformat() for d in day.dates] == ["2017-01-31", "2017-02-01"]
    week, _ = engine.run('channel="CNN"', bucket="week")
    # both days fall in the Monday-aligned week of 2017-01-30
    assert [d.isoformat() for d in week.dates] == ["2017-01-30"]
    assert week.values_ms.tolist() == [90_000]


def test_aggregate_conserves_duration(oracle_pair):
    engine, _, _ = oracle_pair
    rng = np.random.default_rng(73)
    for _ in range(40):
        query = random_query(rng)
        res = engine.evaluate(query)
        total = res.flat.total_ms
        for bucket in ("day", "week", "month", "year"):
            series = engine.aggregate(res.flat, bucket)
            assert series.total_ms() == total


def test_empty_query_empty_series(oracle_pair):
    engine, _, _ = oracle_pair
    series, _ = engine.run('channel="MSNBC"')
    assert series.dates == [] and len(series.values_ms) == 0


def test_normalized_values_bounded(oracle_pair):
    engine, _, _ = oracle_pair
    series, _ = engine.run('tag="female"', bucket="day", normalize=True)
    assert all(0.0 <= v <= 1.0 for v in series.normalized)


def test_date_range_filters_buckets():
    engine = month_boundary_engine()
    from datetime import date

    series, _ = engine.run(
        'channel="CNN"', bucket="day", date_range=(date(2017, 2, 1), date(2017, 2, 28))
    )
    assert [d.isoformat() for d in series.dates] == ["2017-02-01"]
    assert series.values_ms.tolist() == [60_000]


# ----------------------------------------------------------------------
# clips


def clips_engine():
    raw = RawRecords()
    raw.videos = [
        VideoMeta("a", "CNN", "S", parse_rfc3339("2017-01-02T00:00:00Z"), 600_000),
        VideoMeta("b", "CNN", "S", parse_rfc3339("2017-01-01T00:00:00Z"), 600_000),
    ]
    toks = []
    for vi in range(2):
        for k in range(10):
            toks.append((vi, k, 5000 + 4000 * k, 5400 + 4000 * k, "WORD" if k != 4 else "HIT"))
    raw.tok_video = np.array([t[0] for t in toks], dtype=np.int32)
    raw.tok_seq = np.array([t[1] for t in toks], dtype=np.int64)
    raw.tok_t0 = np.array([t[2] for t in toks], dtype=np.int64)
    raw.tok_t1 = np.array([t[3] for t in toks], dtype=np.int64)
    raw.tok_texts = [t[4] for t in toks]
    return Engine(Archive.build(raw, detect_commercial_masks=False))


def test_clips_sorted_and_paginated():
    engine = clips_engine()
    page0 = engine.clips('text="WORD"', page=0, page_size=2)
    page_all = [c for p in range(20) for c in engine.clips('text="WORD"', page=p, page_size=2)]
    assert len(page0) == 2
    # sorted by air time: video b aired first
    assert page0[0].video_id == "b"
    assert len(page_all) == 18
    keys = [(c.air_utc, c.start_ms) for c in page_all]
    assert keys == sorted(keys)


def test_clips_page_out_of_range_empty():
    engine = clips_engine()
    assert engine.clips('text="WORD"', page=99, page_size=100) == []


def test_clips_page_size_cap():
    engine = clips_engine()
    with pytest.raises(MalformedInputError):
        engine.clips('text="WORD"', page=0, page_size=1001)


def test_clip_snippet_covers_padding():
    engine = clips_engine()
    clips = engine.clips('text="HIT"', page=0, page_size=10)
    assert len(clips) == 2
    snip = clips[0].snippet.split()
    # the 5 s pad picks up one 4 s-away neighbour token on each side
    assert snip == ["WORD", "HIT", "WORD"]


def test_clip_intervals_subset_of_eval():
    engine = clips_engine()
    by_video = engine.evaluate_by_video('text="WORD"')
    for clip in engine.clips('text="WORD"', page=0, page_size=100):
        clip_set = IntervalSet(clip.video_id, [(clip.start_ms, clip.end_ms)])
        assert clip_set.minus(by_video[clip.video_id]).duration_sum() == 0


def test_gender_duration_subadditivity_both_ways():
    from screentime.synth import GenderPlan, SynthSpec, WordPlant, generate

    def durations(archive):
        engine = Engine(archive)
        male = engine.evaluate('tag="male"').flat.total_ms
        female = engine.evaluate('tag="female"').flat.total_ms
        either = engine.evaluate('tag="male" OR tag="female"').flat.total_ms
        return male, female, either

    # disjoint gender slots: the genders never co-occur, so equality holds
    raw, _ = generate(201, SynthSpec(videos=2, gender=GenderPlan(0.4)))
    m, f, both = durations(Archive.build(raw, detect_commercial_masks=False))
    assert m + f == both

    # co-occurring plants (each utterance covered by both genders): strict
    raw2, _ = generate(
        202,
        SynthSpec(videos=2, word_plants=(WordPlant("BOTH", 200, p_female=1.0, p_male=1.0),)),
    )
    m2, f2, both2 = durations(Archive.build(raw2, detect_commercial_masks=False))
    assert m2 + f2 > both2
