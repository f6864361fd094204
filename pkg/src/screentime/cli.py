"""Command-line interface: ingest, query, serve, synth, detectors.

Exit codes: 1 for schema/validation failures (offending file:line
printed), 2 for query parse errors (byte offset printed).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .archive import Archive
from .config import load_config
from .detectors import detect_interviews
from .engine import BUCKET_UNITS, Engine
from .errors import MalformedInputError, QuerySyntaxError, SchemaError
from .ingest import IngestReport, ingest, load_snapshot, save_snapshot
from .render import series_csv, series_payload, to_json


@click.group()
def main():
    """Screen-time analytics over annotated TV news archives."""


@main.command("ingest")
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(), help="Snapshot output path.")
@click.option("--sample-period", default=3000, show_default=True, help="Face sample period (ms).")
def cli_ingest(data_dir: str, out: str, sample_period: int):
    """Validate and index a data directory into a snapshot file."""
    try:
        archive, report = ingest(data_dir, sample_period_ms=sample_period)
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    snapshot_id = save_snapshot(archive, out)
    click.echo(report.render())
    click.echo(f"snapshot {snapshot_id} written to {out}")


@main.command("query")
@click.argument("snapshot", type=click.Path(exists=True, dir_okay=False))
@click.argument("query_string")
@click.option("--bucket", default="day", show_default=True, type=click.Choice(BUCKET_UNITS))
@click.option("--normalize", is_flag=True, help="Divide by news-content seconds per bucket.")
@click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "json"]))
def cli_query(snapshot: str, query_string: str, bucket: str, normalize: bool, fmt: str):
    """Run one query and print its time series."""
    archive, _ = load_snapshot(snapshot)
    engine = Engine(archive)
    try:
        series, warnings = engine.run(query_string, bucket=bucket, normalize=normalize)
    except QuerySyntaxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    if fmt == "json":
        click.echo(to_json(series_payload(query_string, series)))
    else:
        click.echo(series_csv(series), nl=False)


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--snapshot", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=None)
def cli_serve(config_path: str | None, snapshot: str | None, port: int | None):
    """Serve the HTTP API over a snapshot."""
    import uvicorn

    from .server import SnapshotHolder, create_app

    cfg = load_config(config_path)
    if port is not None:
        cfg.port = port
    snap_path = snapshot or cfg.snapshot
    if not snap_path:
        click.echo("error: no snapshot given (use --snapshot or the config file)", err=True)
        sys.exit(1)
    archive, snapshot_id = load_snapshot(snap_path)
    app = create_app(SnapshotHolder(archive, snapshot_id), cfg)
    click.echo(f"serving snapshot {snapshot_id} on port {cfg.port}")
    uvicorn.run(app, host="0.0.0.0", port=cfg.port, log_level="warning")


@main.command("synth")
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option(
    "--preset",
    default="demo",
    show_default=True,
    type=click.Choice(["demo", "commercials", "interviews", "gender"]),
)
@click.option("--videos", default=None, type=int, help="Override the preset video count.")
@click.option("--spec-file", type=click.Path(exists=True, dir_okay=False), help="YAML SynthSpec.")
def cli_synth(out_dir: str, seed: int, preset: str, videos: int | None, spec_file: str | None):
    """Generate a synthetic archive plus ground-truth manifest."""
    import yaml

    from . import synth

    if spec_file:
        data = yaml.safe_load(Path(spec_file).read_text(encoding="utf-8")) or {}
        plans = {
            "commercials": synth.CommercialPlan,
            "interviews": synth.InterviewPlan,
            "gender": synth.GenderPlan,
            "screenhog": synth.ScreenhogPlan,
            "ages": synth.AgePlan,
            "hair": synth.HairColorPlan,
        }
        kwargs = {}
        for key, value in data.items():
            if key in plans:
                kwargs[key] = plans[key](**value) if isinstance(value, dict) else None
            elif key == "word_plants":
                kwargs[key] = tuple(synth.WordPlant(**w) for w in value)
            elif key == "person_words":
                kwargs[key] = tuple(synth.PersonWordPlant(**w) for w in value)
            elif key == "channels":
                kwargs[key] = tuple(value)
            else:
                kwargs[key] = value
        spec = synth.SynthSpec(**kwargs)
    else:
        presets = {
            "demo": synth.SynthSpec(videos=6, channels=("CNN", "FOX", "MSNBC"),
                                    gender=synth.GenderPlan(0.3)),
            "commercials": synth.SynthSpec(videos=10, commercials=synth.CommercialPlan()),
            "interviews": synth.SynthSpec(videos=4, interviews=synth.InterviewPlan()),
            "gender": synth.SynthSpec(videos=10, gender=synth.GenderPlan(0.3)),
        }
        spec = presets[preset]
    if videos is not None:
        from dataclasses import replace

        spec = replace(spec, videos=videos)
    try:
        synth.synthesize(seed, spec, out_dir)
    except MalformedInputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"synthetic archive written to {out_dir}")


@main.command("detect-commercials")
@click.argument("snapshot", type=click.Path(exists=True, dir_okay=False))
@click.option("--video", default=None, help="Restrict to one video id.")
@click.option("--format", "fmt", default="csv", show_default=True, type=click.Choice(["csv", "json"]))
def cli_detect_commercials(snapshot: str, video: str | None, fmt: str):
    """Print detected commercial spans per video."""
    archive, _ = load_snapshot(snapshot)
    videos = [video] if video else [v.id for v in archive.videos]
    rows = []
    for vid in videos:
        mask = archive.commercial_set(vid)
        if mask is None:
            rows.append((vid, None, None))
            continue
        for s, e in mask.pairs():
            rows.append((vid, s, e))
    if fmt == "json":
        click.echo(
            to_json(
                [
                    {"video_id": vid, "start_ms": s, "end_ms": e, "unknown": s is None}
                    for vid, s, e in rows
                ]
            )
        )
    else:
        click.echo("video_id,start_ms,end_ms")
        for vid, s, e in rows:
            click.echo(f"{vid},{'' if s is None else s},{'' if e is None else e}")


@main.command("detect-interviews")
@click.argument("snapshot", type=click.Path(exists=True, dir_okay=False))
@click.option("--guest", required=True)
@click.option("--hosts", required=True, help="Comma-separated presenter names.")
@click.option("--video", default=None, help="Restrict to one video id.")
def cli_detect_interviews(snapshot: str, guest: str, hosts: str, video: str | None):
    """Print detected interview spans for a guest."""
    archive, _ = load_snapshot(snapshot)
    host_list = [h.strip() for h in hosts.split(",") if h.strip()]
    videos = [video] if video else [v.id for v in archive.videos]
    click.echo("video_id,start_ms,end_ms")
    try:
        for vid in videos:
            for s, e in detect_interviews(archive, vid, guest, host_list).pairs():
                click.echo(f"{vid},{s},{e}")
    except MalformedInputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
