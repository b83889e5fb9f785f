"""Command-line interface: serve, ask, ingest, transcript."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .config import AppConfig, load_config
from .rag import VectorIndex
from .session import SessionManager
from .synthesis import SynthesisMode


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Config file (YAML); defaults to $EMOCOUNCIL_CONFIG.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, verbose: bool):
    """Emotion-council chat pipeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = load_config(config_path)


def _make_manager(config: AppConfig, transcripts_dir: str | None) -> SessionManager:
    manager = SessionManager(config, transcripts_dir=transcripts_dir)
    index_path = config.rag.index_path
    if index_path and Path(index_path).exists():
        manager.index = VectorIndex.load(
            index_path,
            lambda text: manager.gateway.embed(text, tags={"stage": "index"}),
            max_chunk_chars=config.rag.max_chunk_chars,
        )
        click.echo(f"loaded index snapshot: {index_path} ({len(manager.index)} chunks)")
    return manager


@main.command()
@click.option("--host", default=None, help="Bind address.")
@click.option("--port", default=None, type=int, help="Bind port.")
@click.option("--transcripts-dir", default="transcripts", show_default=True)
@click.pass_obj
def serve(config: AppConfig, host: str | None, port: int | None, transcripts_dir: str):
    """Run the HTTP service."""
    import uvicorn

    from .server import create_app

    manager = _make_manager(config, transcripts_dir)
    if config.rag.corpus_dir and Path(config.rag.corpus_dir).is_dir():
        chunks = manager.ingest_corpus(config.rag.corpus_dir)
        click.echo(f"ingested corpus {config.rag.corpus_dir}: {chunks} chunks")
    try:
        uvicorn.run(
            create_app(manager),
            host=host or config.server.host,
            port=port or config.server.port,
        )
    finally:
        if config.rag.index_path and len(manager.index):
            Path(config.rag.index_path).parent.mkdir(parents=True, exist_ok=True)
            manager.index.save(config.rag.index_path)
            click.echo(f"index snapshot saved: {config.rag.index_path}")


@main.command()
@click.option("--mode", type=click.Choice(["riley", "armando"]), default="riley",
              show_default=True)
@click.option("--question", required=True)
@click.option("--context", "context_text", default=None,
              help="Context text stored verbatim for this ask.")
@click.option("--image", "image_path", type=click.Path(exists=True), default=None,
              help="PNG/JPEG whose description is injected into the turn.")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), default=None,
              help="Corpus directory to ingest before asking (armando).")
@click.option("--transcripts-dir", default="transcripts", show_default=True)
@click.option("--show-deliberation", is_flag=True,
              help="Print every round output and vote, not just the answer.")
@click.pass_obj
def ask(config: AppConfig, mode: str, question: str, context_text: str | None,
        image_path: str | None, corpus_dir: str | None, transcripts_dir: str,
        show_deliberation: bool):
    """Run one question through the full pipeline and print the answer."""
    manager = _make_manager(config, transcripts_dir)
    if corpus_dir:
        chunks = manager.ingest_corpus(corpus_dir)
        click.echo(f"ingested corpus {corpus_dir}: {chunks} chunks")
    session = manager.create_session(SynthesisMode(mode))
    if context_text:
        session.submit_context(context_text)
    if image_path:
        description = session.submit_image(Path(image_path).read_bytes())
        click.echo(f"image described: {description[:120]}")
    answer = session.ask(question)

    if show_deliberation:
        for event in session.log.events():
            if event.kind.value == "generation":
                payload = event.payload
                click.echo(
                    f"[round {payload['round']}] {event.emotion}: "
                    f"{payload['response'][:200]}"
                )
            elif event.kind.value == "vote" and not event.payload.get("abstained"):
                click.echo(
                    f"[vote] {event.emotion} -> {event.payload['choice']}: "
                    f"{event.payload['justification'][:160]}"
                )
    click.echo(f"\nWINNING EMOTIONS: {', '.join(sorted(e.name for e in answer.winning_emotions))}")
    click.echo(f"\nREASONING: {answer.reasoning}")
    if answer.thoughts is not None:
        click.echo(f"\nTHOUGHTS: {answer.thoughts}")
    click.echo(f"\nFINAL ANSWER: {answer.final}")
    click.echo(f"\nsession: {session.id}")
    click.echo(f"transcript: {Path(transcripts_dir) / (session.id + '.jsonl')}")


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--output", "output_path", type=click.Path(), default=None,
              help="Snapshot file to write; defaults to rag.index_path.")
@click.pass_obj
def ingest(config: AppConfig, directory: str, output_path: str | None):
    """Ingest a corpus directory and write an index snapshot."""
    output = output_path or config.rag.index_path
    if not output:
        raise click.UsageError("pass --output or set rag.index_path in the config")
    manager = SessionManager(config)
    chunks = manager.ingest_corpus(directory)
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    manager.index.save(output)
    click.echo(f"ingested {chunks} chunks from {directory} -> {output}")


@main.command()
@click.argument("session_id")
@click.option("--transcripts-dir", default="transcripts", show_default=True)
def transcript(session_id: str, transcripts_dir: str):
    """Print a persisted session transcript (JSONL)."""
    path = Path(transcripts_dir) / f"{session_id}.jsonl"
    if not path.exists():
        click.echo(f"no transcript for session {session_id} under {transcripts_dir}",
                   err=True)
        sys.exit(1)
    click.echo(path.read_text(encoding="utf-8"), nl=False)


if __name__ == "__main__":
    main()
