"""CLI: ingest reports, query output, synth, detector subcommands."""

import json

import pytest
from click.testing import CliRunner

from screentime.cli import main
from screentime.synth import CommercialPlan, GenderPlan, InterviewPlan, SynthSpec, synthesize


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    spec = SynthSpec(
        videos=4,
        channels=("CNN", "FOX"),
        gender=GenderPlan(0.3),
        interviews=InterviewPlan(),
    )
    synthesize(3, spec, base / "data")
    runner = CliRunner()
    result = runner.invoke(
        main, ["ingest", str(base / "data"), "-o", str(base / "snap.bin")]
    )
    assert result.exit_code == 0, result.output
    return base, runner, result.output


def count_lines(path):
    return sum(1 for line in path.open() if line.strip())


def test_ingest_report_counts_match_line_counts(workspace):
    base, _, output = workspace
    want_tokens = count_lines(base / "data" / "tokens.jsonl")
    want_faces = count_lines(base / "data" / "faces.jsonl")
    want_videos = count_lines(base / "data" / "videos.jsonl")
    assert f"tokens: {want_tokens}" in output
    assert f"faces: {want_faces}" in output
    assert f"videos: {want_videos}" in output
    assert "snapshot" in output


def test_ingest_empty_dir(tmp_path):
    runner = CliRunner()
    out = tmp_path / "snap.bin"
    (tmp_path / "empty").mkdir()
    result = runner.invoke(main, ["ingest", str(tmp_path / "empty"), "-o", str(out)])
    assert result.exit_code == 0
    assert "videos: 0" in result.output
    assert out.exists()


def test_ingest_corrupt_line_fails_with_location(tmp_path):
    d = tmp_path / "data"
    d.mkdir()
    (d / "videos.jsonl").write_text(
        '{"id":"v1","channel":"CNN","show":"S","air_utc":"2017-01-01T00:00:00Z","duration_ms":1000}\n'
        "{broken\n"
    )
    runner = CliRunner()
    result = runner.invoke(main, ["ingest", str(d), "-o", str(tmp_path / "s.bin")])
    assert result.exit_code == 1
    assert "videos.jsonl:2" in result.output


def test_query_csv_and_json(workspace):
    base, runner, _ = workspace
    result = runner.invoke(
        main, ["query", str(base / "snap.bin"), 'tag="female"', "--bucket", "day"]
    )
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "date,value"
    assert len(lines) >= 2
    result_json = runner.invoke(
        main,
        ["query", str(base / "snap.bin"), 'tag="female"', "--bucket", "day", "--format", "json"],
    )
    payload = json.loads(result_json.output)
    assert payload["bucket"] == "day"
    assert payload["points"]


def test_query_parse_error_exit_2(workspace):
    base, runner, _ = workspace
    result = runner.invoke(main, ["query", str(base / "snap.bin"), 'tag="female'])
    assert result.exit_code == 2
    assert "offset" in result.output


def test_query_empty_archive_csv_header(tmp_path):
    runner = CliRunner()
    (tmp_path / "empty").mkdir()
    runner.invoke(main, ["ingest", str(tmp_path / "empty"), "-o", str(tmp_path / "s.bin")])
    result = runner.invoke(main, ["query", str(tmp_path / "s.bin"), 'tag="male"'])
    assert result.exit_code == 0
    assert result.output == "date,value\n"


def test_synth_deterministic(tmp_path):
    runner = CliRunner()
    r1 = runner.invoke(main, ["synth", str(tmp_path / "a"), "--seed", "5", "--preset", "gender"])
    r2 = runner.invoke(main, ["synth", str(tmp_path / "b"), "--seed", "5", "--preset", "gender"])
    assert r1.exit_code == 0 and r2.exit_code == 0
    for name in ("videos.jsonl", "faces.jsonl", "tokens.jsonl", "truth.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_synth_spec_file(tmp_path):
    runner = CliRunner()
    spec_file = tmp_path / "spec.yaml"
    spec_file.write_text(
        "videos: 2\nchannels: [CNN]\ngender: {female_share: 0.5}\n", encoding="utf-8"
    )
    result = runner.invoke(
        main, ["synth", str(tmp_path / "out"), "--seed", "1", "--spec-file", str(spec_file)]
    )
    assert result.exit_code == 0, result.output
    truth = json.loads((tmp_path / "out" / "truth.json").read_text())
    assert truth["videos"]["count"] == 2


def test_detect_commercials_command(tmp_path):
    runner = CliRunner()
    spec = SynthSpec(videos=2, commercials=CommercialPlan())
    synthesize(7, spec, tmp_path / "data")
    runner.invoke(main, ["ingest", str(tmp_path / "data"), "-o", str(tmp_path / "s.bin")])
    result = runner.invoke(main, ["detect-commercials", str(tmp_path / "s.bin")])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "video_id,start_ms,end_ms"
    assert len(lines) > 1
    truth = json.loads((tmp_path / "data" / "truth.json").read_text())
    got: dict = {}
    for line in lines[1:]:
        vid, s, e = line.split(",")
        got.setdefault(vid, []).append((int(s), int(e)))
    # caption-free blocks detect with a few seconds of slack (the
    # no-caption span runs from the last news token to the next one)
    for vid, spans in truth["commercials"].items():
        assert len(got[vid]) == len(spans)
        for (gs, ge), (ts, te) in zip(sorted(got[vid]), spans):
            assert abs(gs - ts) <= 5000 and abs(ge - te) <= 5000


def test_detect_interviews_command(workspace):
    base, runner, _ = workspace
    result = runner.invoke(
        main,
        [
            "detect-interviews",
            str(base / "snap.bin"),
            "--guest",
            "Guest Person",
            "--hosts",
            "Host Person",
        ],
    )
    assert result.exit_code == 0
    truth = json.loads((base / "data" / "truth.json").read_text())
    lines = result.output.strip().splitlines()[1:]
    got = {}
    for line in lines:
        vid, s, e = line.split(",")
        got.setdefault(vid, []).append([int(s), int(e)])
    assert got == truth["interviews"]["spans"]


def test_detect_interviews_unknown_guest(workspace):
    base, runner, _ = workspace
    result = runner.invoke(
        main,
        ["detect-interviews", str(base / "snap.bin"), "--guest", "Nobody", "--hosts", "X"],
    )
    assert result.exit_code == 1


def test_query_series_matches_grid_oracle_golden(tmp_path):
    """The CLI series for tag="female" equals a golden value computed by
    the independent 10 ms-grid oracle over the raw records."""
    from screentime.qlang import parse
    from screentime.synth import generate, write_files
    from boolean_oracle import OracleArchive, GRID

    spec = SynthSpec(videos=4, channels=("CNN",), gender=GenderPlan(0.45))
    raw, truth = generate(55, spec)
    write_files(raw, truth, tmp_path / "data")

    oracle = OracleArchive(raw)
    per_day: dict = {}
    for vi, mask in enumerate(oracle.eval_query(parse('tag="female"'))):
        day = raw.videos[vi].air_utc.date().isoformat()
        per_day[day] = per_day.get(day, 0) + int(mask.sum()) * GRID
    golden = "date,value\n" + "\n".join(
        f"{day},{ms / 1000:.3f}" for day, ms in sorted(per_day.items())
    ) + "\n"

    runner = CliRunner()
    assert runner.invoke(
        main, ["ingest", str(tmp_path / "data"), "-o", str(tmp_path / "s.bin")]
    ).exit_code == 0
    result = runner.invoke(
        main, ["query", str(tmp_path / "s.bin"), 'tag="female"', "--bucket", "day"]
    )
    assert result.output == golden
