"""Analytics studies: associations, mentions, countries, presenter stats."""

from datetime import date, timedelta

import numpy as np
import pytest

from screentime.analytics import (
    CountryLexicon,
    MentionRule,
    NewsEvent,
    overlaps_flat,
    age_years,
    classify_mentions,
    country_mentions,
    event_coverage,
    gender_baseline,
    group_share,
    honorific_scatter,
    mention_counts,
    person_word_association,
    screenhog,
    unique_words,
    weighted_age,
    word_gender_association,
    HONORIFIC,
    BARE,
    EXCLUDED,
)
from screentime.archive import Archive, Person, RawRecords, VideoMeta
from screentime.ingest import parse_rfc3339
from screentime.lexicons import (
    load_countries,
    load_events,
    load_mention_rules,
    load_name_denylist,
    load_stopwords,
)
from screentime.synth import (
    AgePlan,
    HairColorPlan,
    PersonWordPlant,
    ScreenhogPlan,
    SynthSpec,
    WordPlant,
    generate,
)

from reference_matchers import country_reference, mention_reference


def stream_archive(videos_tokens, persons=(), faces=(), air0="2017-06-01T12:00:00Z",
                   duration_ms=3_600_000):
    """Archive from per-video token text lists (2.5 s spacing) plus
    optional (video, t, gender, identity_name) face rows."""
    raw = RawRecords()
    raw.persons = list(persons)
    identity_names: list[str] = []
    identity_index: dict[str, int] = {}
    t0 = parse_rfc3339(air0)
    for vi, tokens in enumerate(videos_tokens):
        raw.videos.append(
            VideoMeta(
                f"v{vi}", "CNN", "Show", t0 + vi * timedelta(milliseconds=duration_ms), duration_ms
            )
        )
    t_video, t_seq, t_t0, t_t1, t_text = [], [], [], [], []
    for vi, tokens in enumerate(videos_tokens):
        for k, w in enumerate(tokens):
            t_video.append(vi)
            t_seq.append(k)
            t_t0.append(k * 2500)
            t_t1.append(k * 2500 + 400)
            t_text.append(w)
    raw.tok_video = np.array(t_video, dtype=np.int32)
    raw.tok_seq = np.array(t_seq, dtype=np.int64)
    raw.tok_t0 = np.array(t_t0, dtype=np.int64)
    raw.tok_t1 = np.array(t_t1, dtype=np.int64)
    raw.tok_texts = t_text
    f_video, f_t, f_gender, f_ident = [], [], [], []
    for vi, t, gender, name in faces:
        if name is not None and name.lower() not in identity_index:
            identity_index[name.lower()] = len(identity_names)
            identity_names.append(name)
        f_video.append(vi)
        f_t.append(t)
        f_gender.append(0 if gender == "male" else 1)
        f_ident.append(identity_index[name.lower()] if name else -1)
    n = len(f_video)
    raw.face_video = np.array(f_video, dtype=np.int32)
    raw.face_t = np.array(f_t, dtype=np.int64)
    raw.face_bbox = np.tile(np.array([0.1, 0.1, 0.4, 0.5], np.float32), (n, 1))
    raw.face_gender = np.array(f_gender, dtype=np.int8)
    raw.face_gender_score = np.ones(n, dtype=np.float32)
    raw.face_identity = np.array(f_ident, dtype=np.int32)
    raw.face_identity_score = np.ones(n, dtype=np.float32)
    raw.face_desc = np.full(n, -1, dtype=np.int32)
    raw.identity_names = identity_names
    return Archive.build(raw, detect_commercial_masks=False)


TRUMP_RULE = load_mention_rules()["trump"]


# ----------------------------------------------------------------------
# mention counting


def test_president_trump_is_honorific():
    archive = stream_archive([["WE", "HEARD", "PRESIDENT", "TRUMP", "SAY"]])
    _, classes, _ = classify_mentions(archive, TRUMP_RULE)
    assert classes.tolist() == [HONORIFIC]


def test_president_donald_trump_is_honorific():
    archive = stream_archive([["PRESIDENT", "DONALD", "TRUMP", "SPOKE"]])
    _, classes, _ = classify_mentions(archive, TRUMP_RULE)
    assert classes.tolist() == [HONORIFIC]


def test_the_trump_administration_excluded_once():
    archive = stream_archive([["THE", "TRUMP", "ADMINISTRATION", "SAID"]])
    _, classes, _ = classify_mentions(archive, TRUMP_RULE)
    assert classes.tolist() == [EXCLUDED]


def test_family_and_bare_mentions():
    archive = stream_archive(
        [["MELANIA", "TRUMP", "ARRIVED"], ["DONALD", "TRUMP", "ARRIVED"], ["TRUMP", "WON"]]
    )
    _, classes, _ = classify_mentions(archive, TRUMP_RULE)
    assert classes.tolist() == [EXCLUDED, BARE, BARE]


def test_mention_partition_property():
    rng = np.random.default_rng(83)
    pool = ["TRUMP", "PRESIDENT", "DONALD", "THE", "ADMINISTRATION", "MELANIA", "NEWS", "TODAY"]
    videos = [
        [str(rng.choice(pool)) for _ in range(int(rng.integers(5, 60)))] for _ in range(30)
    ]
    archive = stream_archive(videos)
    _, classes, _ = classify_mentions(archive, TRUMP_RULE)
    total = sum(v.count("TRUMP") for v in videos)
    assert len(classes) == total


def test_mention_counts_bucketed():
    archive = stream_archive([["PRESIDENT", "TRUMP"], ["TRUMP", "TODAY"]])
    out = mention_counts(archive, TRUMP_RULE, bucket="month")
    assert out == {"2017-06-01": {"honorific": 1, "bare": 1, "excluded": 0}}


def test_mention_fuzz_matches_reference():
    rng = np.random.default_rng(89)
    pool = [
        "TRUMP", "PRESIDENT", "DONALD", "THE", "ADMINISTRATION", "CAMPAIGN", "UNIVERSITY",
        "CARE", "JR", "MELANIA", "IVANKA", "ERIC", "BARRON", "SAID", "TODAY", "NEWS",
    ]
    videos = [
        [str(rng.choice(pool)) for _ in range(int(rng.integers(0, 80)))] for _ in range(400)
    ]
    archive = stream_archive(videos)
    pos, classes, _ = classify_mentions(archive, TRUMP_RULE)
    vids = np.searchsorted(archive.tok_offsets, pos, side="right") - 1
    local = pos - archive.tok_offsets[vids]
    label = {HONORIFIC: "honorific", BARE: "bare", EXCLUDED: "excluded"}
    got = sorted(
        (int(v), int(i), label[int(c)]) for v, i, c in zip(vids, local, classes)
    )
    want = sorted(mention_reference(videos, TRUMP_RULE))
    assert got == want


# ----------------------------------------------------------------------
# country counting


def test_new_mexico_not_counted():
    lex = load_countries()
    archive = stream_archive([["NEW", "MEXICO", "VOTES", "TODAY"]])
    assert country_mentions(archive, lex) == {}


def test_plain_mexico_counted():
    lex = load_countries()
    archive = stream_archive([["MEXICO", "VOTES"]])
    out = country_mentions(archive, lex)
    assert out["Mexico"]["total"] == 1


def test_holy_see_and_vatican_are_aliases():
    lex = load_countries()
    archive = stream_archive([["THE", "VATICAN", "AND", "THE", "HOLY", "SEE"]])
    out = country_mentions(archive, lex)
    assert out["Vatican City"]["total"] == 2


def test_georgia_omitted_entirely():
    lex = load_countries()
    archive = stream_archive([["GEORGIA", "RUSSIA", "GEORGIA"]])
    out = country_mentions(archive, lex)
    assert "Georgia" not in out
    assert out["Russia"]["total"] == 1


def test_longest_alias_first():
    lex = load_countries()
    archive = stream_archive([["PAPUA", "NEW", "GUINEA", "AND", "GUINEA"]])
    out = country_mentions(archive, lex)
    assert out["Papua New Guinea"]["total"] == 1
    assert out["Guinea"]["total"] == 1


def test_country_fuzz_matches_reference():
    lex = load_countries()
    rng = np.random.default_rng(97)
    pool = [
        "NEW", "MEXICO", "GEORGIA", "NORTH", "SOUTH", "KOREA", "GUINEA", "PAPUA",
        "HOLY", "SEE", "VATICAN", "RUSSIA", "CHINA", "IRAN", "TODAY", "NEWS", "AND",
        "ZEALAND", "AFRICA", "SUDAN",
    ]
    videos = [
        [str(rng.choice(pool)) for _ in range(int(rng.integers(0, 60)))] for _ in range(400)
    ]
    archive = stream_archive(videos)
    got = {c: v["total"] for c, v in country_mentions(archive, lex).items()}
    want = country_reference(videos, lex)
    assert got == want


# ----------------------------------------------------------------------
# word <-> gender association


@pytest.fixture(scope="module")
def word_archive():
    spec = SynthSpec(
        videos=4,
        channels=("CNN", "FOX"),
        word_plants=(
            WordPlant("CLIMATE", 600, p_female=0.8, p_male=0.2),
            WordPlant("MARKETS", 400, p_female=0.1, p_male=0.7),
        ),
    )
    raw, truth = generate(101, spec)
    return Archive.build(raw), truth


def test_word_association_recovers_planted_rates(word_archive):
    archive, truth = word_archive
    out = word_gender_association(archive, min_count=100, top_fraction=1.0)
    by_word = {a.word: a for a in out}
    assert abs(by_word["CLIMATE"].p_female - 0.8) <= 0.02
    assert abs(by_word["CLIMATE"].p_male - 0.2) <= 0.02
    assert abs(by_word["MARKETS"].p_female - 0.1) <= 0.02
    assert by_word["CLIMATE"].count == 600
    # ranking by diff puts the female-associated word first
    assert out[0].word == "CLIMATE"


def test_word_association_stopwords_and_min_count(word_archive):
    archive, _ = word_archive
    out = word_gender_association(
        archive, min_count=100, top_fraction=1.0, stopwords=frozenset({"CLIMATE"})
    )
    assert "CLIMATE" not in {a.word for a in out}
    out2 = word_gender_association(archive, min_count=401, top_fraction=1.0)
    assert {a.word for a in out2} >= {"CLIMATE"}
    assert "MARKETS" not in {a.word for a in out2}


def test_word_association_baseline_property(word_archive):
    archive, _ = word_archive
    out = word_gender_association(archive, min_count=1, top_fraction=1.0)
    total = sum(a.count for a in out)
    f_mass = sum(a.count * a.p_female for a in out)
    base_f, base_m = gender_baseline(archive)
    assert abs(f_mass / total - base_f) < 1e-9
    m_mass = sum(a.count * a.p_male for a in out)
    assert abs(m_mass / total - base_m) < 1e-9


def test_empty_archive_empty_list():
    archive = stream_archive([[]])
    assert word_gender_association(archive) == []


# ----------------------------------------------------------------------
# unique words


def test_unique_words_person_never_on_screen():
    archive = stream_archive([["HELLO"] * 200])
    assert unique_words(archive, "Ghost Person", min_count=10) == []


def test_unique_words_planted_catchphrase():
    spec = SynthSpec(
        videos=4,
        person_words=(PersonWordPlant("Quirky Host", "PSYCHOTALK", 300, 0.6, 0.01),),
    )
    raw, _ = generate(103, spec)
    archive = Archive.build(raw)
    out = unique_words(archive, "Quirky Host", min_count=100, threshold=0.5)
    words = {w: p for w, p, _ in out}
    assert "PSYCHOTALK" in words
    assert abs(words["PSYCHOTALK"] - 0.6) <= 0.02


def test_unique_words_probability_one():
    faces = [(0, 0, "female", "Solo Star")]
    archive = stream_archive([["UNIQUEWORD", "OTHER", "OFFSCREEN"]], faces=faces)
    # the face [0, 3000) covers the first two tokens but not the third
    out = unique_words(archive, "Solo Star", min_count=1, threshold=0.5)
    assert ("UNIQUEWORD", 1.0, 1) in out
    assert all(w != "OFFSCREEN" for w, _, _ in out)


# ----------------------------------------------------------------------
# screenhog, age, hair shares


def test_screenhog_planted():
    spec = SynthSpec(
        videos=102,
        channels=("FOX",),
        screenhog=ScreenhogPlan(fraction=0.7),
    )
    raw, truth = generate(107, spec)
    archive = Archive.build(raw, detect_commercial_masks=False)
    score = screenhog(archive, "Hog Presenter", "The Hog Show", min_show_hours=100)
    assert score.eligible
    assert abs(score.fraction - truth["screenhog"]["empirical_fraction"]) < 1e-9
    assert abs(score.fraction - 0.7) <= 0.01


def test_screenhog_absent_and_ineligible():
    archive = stream_archive([["NEWS"] * 100])
    score = screenhog(archive, "Nobody", "Show", min_show_hours=100)
    assert score.fraction == 0.0
    assert not score.eligible


def test_screenhog_full_presence():
    faces = [(0, t, "male", "Always On") for t in range(0, 3_600_000, 3000)]
    archive = stream_archive([["NEWS"] * 100], faces=faces)
    score = screenhog(archive, "Always On", "Show", min_show_hours=0.5)
    assert score.fraction == 1.0


def test_weighted_age_single_presenter_exact():
    persons = [Person("Anna Exact", frozenset({"CNN"}), "female", date(1967, 6, 1))]
    faces = [(0, t, "female", "Anna Exact") for t in range(0, 60_000, 3000)]
    archive = stream_archive([["NEWS"] * 100], persons=persons, faces=faces)
    out = weighted_age(archive, "CNN", bucket="year")
    assert out == {"2017-01-01": 50.0}


def test_weighted_age_two_presenters_mean():
    persons = [
        Person("Old Anchor", frozenset({"CNN"}), "male", date(1957, 6, 1)),
        Person("Young Anchor", frozenset({"CNN"}), "female", date(1977, 6, 1)),
    ]
    faces = [(0, t, "male", "Old Anchor") for t in range(0, 60_000, 3000)]
    faces += [(0, t, "female", "Young Anchor") for t in range(120_000, 180_000, 3000)]
    archive = stream_archive([["NEWS"] * 100], persons=persons, faces=faces)
    out = weighted_age(archive, "CNN", bucket="year")
    assert out == {"2017-01-01": 50.0}


def test_weighted_age_planted_mix():
    spec = SynthSpec(
        videos=20,
        channels=("CNN",),
        ages=AgePlan(
            entries=(
                ("Anchor A", "1962-03-15", 0.5),
                ("Anchor B", "1980-09-01", 0.3),
                ("Anchor C", "1990-01-20", 0.2),
            )
        ),
    )
    raw, truth = generate(109, spec)
    archive = Archive.build(raw, detect_commercial_masks=False)
    out = weighted_age(archive, "CNN", bucket="year")
    assert set(out) == {"2017-01-01"}
    assert abs(out["2017-01-01"] - truth["ages"]["expected_mean_age"]) <= 0.05


def test_group_share_single_group():
    faces = [(0, t, "female", "Only Person") for t in range(0, 30_000, 3000)]
    persons = [Person("Only Person", frozenset({"CNN"}), "female", None, "blonde")]
    archive = stream_archive([["NEWS"] * 100], persons=persons, faces=faces)
    out = group_share(archive, {"Only Person": "blonde"}, ["Only Person"])
    assert out["overall"] == {"blonde": 1.0}


def test_group_share_disjoint_equal_groups():
    faces = [(0, t, "female", "A Person") for t in range(0, 30_000, 3000)]
    faces += [(0, t, "female", "B Person") for t in range(60_000, 90_000, 3000)]
    archive = stream_archive([["NEWS"] * 100], faces=faces)
    out = group_share(
        archive, {"A Person": "blonde", "B Person": "brown"}, ["A Person", "B Person"]
    )
    assert out["overall"] == {"blonde": 0.5, "brown": 0.5}


def test_hair_share_planted():
    spec = SynthSpec(
        videos=20,
        channels=("MSNBC",),
        hair=HairColorPlan(
            entries=(
                ("Blonde One", "blonde", 0.35),
                ("Blonde Two", "blonde", 0.25),
                ("Brown One", "brown", 0.4),
            )
        ),
    )
    raw, truth = generate(113, spec)
    archive = Archive.build(raw, detect_commercial_masks=False)
    domain = ["Blonde One", "Blonde Two", "Brown One"]
    groups = {p.name: p.hair_color for p in archive.persons}
    out = group_share(archive, groups, domain)
    assert abs(out["overall"]["blonde"] - 0.6) <= 0.01
    assert abs(out["overall"]["brown"] - 0.4) <= 0.01
    assert abs(out["overall"]["blonde"] - truth["hair"]["shares"]["blonde"]) < 1e-9


# ----------------------------------------------------------------------
# person <-> word association


def test_person_word_planted_rates():
    spec = SynthSpec(
        videos=6,
        person_words=(PersonWordPlant("Topic Person", "EMAIL", 500, 0.11, 0.02),),
    )
    raw, truth = generate(127, spec)
    archive = Archive.build(raw)
    out = person_word_association(archive, "Topic Person", ["EMAIL"], bucket="year")
    planted = truth["person_words"]["EMAIL"]
    assert abs(out["overall"] - 0.11) <= 0.01
    assert abs(out["overall"] - planted["empirical_rate"]) < 1e-9
    assert abs(out["baseline"] - 0.02) <= 0.01


def test_person_word_never_on_screen():
    archive = stream_archive([["EMAIL", "NEWS", "EMAIL"]])
    out = person_word_association(archive, "Ghost", ["EMAIL"])
    assert out["overall"] == 0.0 and out["baseline"] == 0.0
    assert out["count"] == 2


def test_person_word_multi_token_phrase():
    faces = [(0, 1500, "female", "Phrase Person")]
    archive = stream_archive([["E", "MAIL", "TODAY"]], faces=faces)
    out = person_word_association(archive, "Phrase Person", ["E MAIL"])
    assert out["count"] == 1
    assert out["overall"] == 1.0


# ----------------------------------------------------------------------
# honorific scatter


def scatter_archive():
    videos = []
    faces = []
    # presenter A: 80 honorific / 20 bare Trump; 40 honorific / 60 bare Obama
    tokens = []
    for i in range(100):
        tokens += ["PRESIDENT", "TRUMP"] if i < 80 else ["SO", "TRUMP"]
    for i in range(100):
        tokens += ["PRESIDENT", "OBAMA"] if i < 40 else ["SO", "OBAMA"]
    videos.append(tokens)
    n = len(tokens)
    faces += [(0, t, "male", "Anchor A") for t in range(0, n * 2500 + 3000, 3000)]
    # presenter B: below the mention threshold
    videos.append(["PRESIDENT", "TRUMP"] * 10)
    faces += [(1, t, "male", "Anchor B") for t in range(0, 50_000, 3000)]
    persons = [
        Person("Anchor A", frozenset({"CNN"}), "male"),
        Person("Anchor B", frozenset({"CNN"}), "male"),
    ]
    return stream_archive(videos, persons=persons, faces=faces)


def test_honorific_scatter_fractions_and_threshold():
    archive = scatter_archive()
    rules = load_mention_rules()
    out = honorific_scatter(
        archive, ["Anchor A", "Anchor B"], rules["trump"], rules["obama"], min_mentions=100
    )
    assert set(out) == {"Anchor A"}
    x, y = out["Anchor A"]
    assert abs(x - 0.8) < 1e-9
    assert abs(y - 0.4) < 1e-9


def test_honorific_scatter_all_honorific_is_one_one():
    videos = [["PRESIDENT", "TRUMP"] * 100 + ["PRESIDENT", "OBAMA"] * 100]
    faces = [(0, t, "male", "Anchor A") for t in range(0, 100_0000 + 3000, 3000)]
    persons = [Person("Anchor A", frozenset({"CNN"}), "male")]
    archive = stream_archive(videos, persons=persons, faces=faces)
    rules = load_mention_rules()
    out = honorific_scatter(archive, ["Anchor A"], rules["trump"], rules["obama"])
    assert out["Anchor A"] == (1.0, 1.0)


def test_honorific_scatter_omits_offscreen_presenter():
    videos = [["PRESIDENT", "TRUMP"] * 100 + ["PRESIDENT", "OBAMA"] * 100]
    persons = [Person("Anchor A", frozenset({"CNN"}), "male")]
    archive = stream_archive(videos, persons=persons)
    rules = load_mention_rules()
    out = honorific_scatter(archive, ["Anchor A"], rules["trump"], rules["obama"])
    assert out == {}


# ----------------------------------------------------------------------
# event coverage


def test_event_coverage_zero_series():
    archive = stream_archive([["CALM", "NEWS"] * 10])
    events = [NewsEvent(date(2017, 6, 1), "mass_shooting", "Event X", ("SHOOTING",))]
    out = event_coverage(archive, events, window_days=5)
    assert out["Event X"]["counts"] == [0, 0, 0, 0, 0, 0]  # days 0..5 inclusive


def test_event_coverage_truncated_by_same_category():
    archive = stream_archive([["SHOOTING"]])
    events = [
        NewsEvent(date(2017, 6, 1), "mass_shooting", "First", ("SHOOTING",)),
        NewsEvent(date(2017, 6, 22), "mass_shooting", "Second", ("SHOOTING",)),
        NewsEvent(date(2017, 6, 2), "plane_crash", "Other Cat", ("CRASH",)),
    ]
    out = event_coverage(archive, events, window_days=60)
    assert out["First"]["days"] == 21
    assert out["Second"]["days"] == 61
    assert out["Other Cat"]["days"] == 61


def test_event_coverage_planted_counts():
    # one video per day for 5 days; SHOOTING said  3,2,1,0,4  times
    plan = [3, 2, 1, 0, 4]
    videos = []
    for n in plan:
        videos.append(["SHOOTING"] * n + ["CALM"] * 5)
    archive = stream_archive(videos, air0="2017-06-01T02:00:00Z", duration_ms=86_400_000)
    events = [NewsEvent(date(2017, 6, 1), "mass_shooting", "Planted", ("SHOOTING",))]
    out = event_coverage(archive, events, window_days=4)
    assert out["Planted"]["counts"] == plan


def test_shipped_lexicons_load():
    assert "I" in load_stopwords()
    assert len(load_events()) > 50
    assert "ALISYN" in load_name_denylist()


# ----------------------------------------------------------------------
# age arithmetic


def test_age_years_exact_birthday():
    assert age_years(date(1970, 3, 1), date(2020, 3, 1)) == 50.0


def test_age_years_day_granularity():
    a = age_years(date(1970, 3, 1), date(2020, 3, 2))
    assert 50.0 < a < 50.01


def test_permutation_invariance():
    videos = [["PRESIDENT", "TRUMP", "NEWS"], ["TRUMP", "TODAY"], ["MEXICO", "NEWS"]]
    lex = load_countries()
    a1 = stream_archive(videos)
    a2 = stream_archive(videos[::-1])
    c1 = {c: v["total"] for c, v in country_mentions(a1, lex).items()}
    c2 = {c: v["total"] for c, v in country_mentions(a2, lex).items()}
    assert c1 == c2
    m1 = classify_mentions(a1, TRUMP_RULE)[1]
    m2 = classify_mentions(a2, TRUMP_RULE)[1]
    assert sorted(m1.tolist()) == sorted(m2.tolist())


def test_association_numerators_match_query_engine(word_archive):
    # the conditional-probability numerator equals the count of
    # utterances overlapping the query engine's female evaluation
    from screentime.engine import Engine
    from screentime.archive import Flat

    archive, _ = word_archive
    engine = Engine(archive)
    out = word_gender_association(archive, min_count=100, top_fraction=1.0)
    by_word = {a.word: a for a in out}
    female_eval = engine.evaluate('tag="female"').flat
    for word in ("CLIMATE", "MARKETS"):
        _, g0, g1 = engine.phrase_intervals(word)
        in_news = overlaps_flat(archive.news_flat, g0, g1)
        covered = overlaps_flat(female_eval, g0, g1) & in_news
        assoc = by_word[word]
        assert int(covered.sum()) == round(assoc.p_female * assoc.count)
        assert int(in_news.sum()) == assoc.count
