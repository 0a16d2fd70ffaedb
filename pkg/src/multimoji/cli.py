"""Command line front end.

Exit codes follow one convention everywhere: 0 success, 1 domain or
validation failure (invalid catalog, unknown element, bad config values),
2 usage or I/O errors (unreadable files, bad flags).
"""

from __future__ import annotations

import asyncio
import json
import signal
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from .catalog import (
    Catalog,
    CatalogError,
    CatalogParseError,
    CatalogValidationError,
    Modality,
    bundled_catalog_path,
    load_catalog,
)
from .codec import decode_body
from .history import HistoryStore
from .reco import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    Selection,
    Weights,
    inverse_document_frequency,
    rank_modality,
    ranking_score,
    term_frequency,
)
from .relay.core import UserConfig
from .relay.server import RelayServer


@dataclass(frozen=True)
class ServerConfig:
    data_dir: Path
    users: dict[str, UserConfig]
    host: str = "127.0.0.1"
    port: int = 0
    catalog_path: Path = field(default_factory=bundled_catalog_path)
    weights: Weights = field(default_factory=Weights)
    webhook_url: str | None = None
    static_dir: Path | None = None


def load_server_config(path: str | Path) -> ServerConfig:
    """Parse a server config file; relative paths resolve against it."""
    path = Path(path)
    base = path.parent
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError("config is not valid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    users_doc = doc.get("users")
    if not isinstance(users_doc, dict) or not users_doc:
        raise ValueError("config needs a non-empty users object")
    users = {}
    for user_id, entry in users_doc.items():
        if not isinstance(entry, dict):
            raise ValueError("user %r entry must be an object" % user_id)
        token = entry.get("token")
        partner = entry.get("partner")
        if not isinstance(token, str) or not token:
            raise ValueError("user %r needs a non-empty token" % user_id)
        if not isinstance(partner, str) or not partner:
            raise ValueError("user %r needs a partner" % user_id)
        users[user_id] = UserConfig(token=token, partner_id=partner)
    for user_id, cfg in users.items():
        partner_cfg = users.get(cfg.partner_id)
        if (
            cfg.partner_id == user_id
            or partner_cfg is None
            or partner_cfg.partner_id != user_id
        ):
            raise ValueError(
                "users must form disjoint pairs: %r and %r are not mutual"
                % (user_id, cfg.partner_id)
            )
    if "data_dir" not in doc:
        raise ValueError("config needs a data_dir")
    try:
        weights = Weights(
            alpha=float(doc.get("alpha", DEFAULT_ALPHA)),
            beta=float(doc.get("beta", DEFAULT_BETA)),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError("bad alpha/beta: %s" % exc) from exc
    catalog_path = (
        base / doc["catalog"] if "catalog" in doc else bundled_catalog_path()
    )
    static_dir = base / doc["static_dir"] if "static_dir" in doc else None
    port = doc.get("port", 0)
    if not isinstance(port, int) or isinstance(port, bool) or not 0 <= port < 65536:
        raise ValueError("port must be an integer in 0..65535")
    return ServerConfig(
        data_dir=base / doc["data_dir"],
        users=users,
        host=doc.get("host", "127.0.0.1"),
        port=port,
        catalog_path=catalog_path,
        weights=weights,
        webhook_url=doc.get("webhook_url"),
        static_dir=static_dir,
    )


def _load_catalog_or_exit(path) -> Catalog:
    try:
        return load_catalog(path)
    except OSError as exc:
        click.echo("cannot read catalog: %s" % exc, err=True)
        sys.exit(2)
    except CatalogValidationError as exc:
        for violation in exc.violations:
            click.echo(violation, err=True)
        sys.exit(1)
    except CatalogParseError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)


@click.group()
def main():
    """Multi-modal emoticon relay and ranking tools."""


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(),
    help="Path of the server config JSON.",
)
def serve(config_path):
    """Run the relay server until interrupted."""
    try:
        config = load_server_config(config_path)
    except OSError as exc:
        click.echo("cannot read config: %s" % exc, err=True)
        sys.exit(2)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    catalog = _load_catalog_or_exit(config.catalog_path)
    try:
        server = RelayServer(
            catalog,
            config.users,
            config.data_dir,
            host=config.host,
            port=config.port,
            weights=config.weights,
            webhook_url=config.webhook_url,
            static_dir=config.static_dir,
        )
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    try:
        asyncio.run(_run_server(server))
    except OSError as exc:
        click.echo("cannot listen on %s:%d: %s" % (config.host, config.port, exc), err=True)
        sys.exit(2)


async def _run_server(server: RelayServer) -> None:
    await server.start()
    click.echo("listening %s:%d" % (server.host, server.port))
    sys.stdout.flush()
    loop = asyncio.get_running_loop()
    stop = asyncio.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        loop.add_signal_handler(sig, stop.set)
    serve_task = asyncio.ensure_future(server.serve_forever())
    await stop.wait()
    serve_task.cancel()
    await server.stop()


@main.group()
def catalog():
    """Catalog inspection commands."""


@catalog.command()
@click.argument("path", type=click.Path())
def validate(path):
    """Check a catalog document; print every violation."""
    cat = _load_catalog_or_exit(path)
    click.echo(
        "ok: %d stickers, %d animations, %d vibrations"
        % (
            cat.count(Modality.STICKER),
            cat.count(Modality.ANIMATION),
            cat.count(Modality.VIBRATION),
        )
    )


def _parse_select(values, cat: Catalog):
    picks = []
    for value in values:
        modality_raw, sep, element_id = value.partition("=")
        if not sep or not element_id:
            raise ValueError("--select needs modality=id, got %r" % value)
        try:
            modality = Modality(modality_raw)
        except ValueError:
            raise ValueError("no modality %r" % modality_raw) from None
        if cat.get(modality, element_id) is None:
            raise ValueError("no %s with id %r" % (modality.value, element_id))
        picks.append(cat.require(modality, element_id))
    return picks


@main.command()
@click.option("--catalog", "catalog_path", required=True, type=click.Path())
@click.option(
    "--history",
    "history_path",
    required=True,
    type=click.Path(),
    help="Text file with one encoded emoticon token per line.",
)
@click.option(
    "--select",
    "selects",
    multiple=True,
    required=True,
    help="modality=id, up to twice with distinct modalities.",
)
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
def simulate(catalog_path, history_path, selects, alpha, beta):
    """Rank the unselected modalities for a given history and selection."""
    cat = _load_catalog_or_exit(catalog_path)
    try:
        history_text = Path(history_path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo("cannot read history: %s" % exc, err=True)
        sys.exit(2)
    store = HistoryStore(cat)
    user = "simulated"
    try:
        for lineno, line in enumerate(history_text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            body = decode_body(line)
            emoticons = body.emoticons()
            if not emoticons or body.text().strip():
                raise ValueError(
                    "line %d: expected emoticon tokens only, got %r" % (lineno, line)
                )
            for emoticon in emoticons:
                store.record_send(user, emoticon, ts_ms=lineno)
        picks = _parse_select(selects, cat)
        selection = Selection(elements=tuple(picks))
        weights = Weights(
            alpha=alpha if alpha is not None else DEFAULT_ALPHA,
            beta=beta if beta is not None else DEFAULT_BETA,
        )
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    click.echo("alpha=%g beta=%g" % (weights.alpha, weights.beta))
    pair_counts = store.for_user(user)
    for modality in Modality:
        if modality in selection.modalities:
            continue
        click.echo("ranking %s" % modality.value)
        click.echo("id\tp\ttf\tidf\ttf_idf\tr\trank")
        order = rank_modality(selection, modality, cat, pair_counts, weights)
        for rank, element_id in enumerate(order, start=1):
            candidate = cat.require(modality, element_id)
            score = ranking_score(selection, candidate, cat, pair_counts, weights)
            # tf and idf are informative: with two selections they are the
            # per-selection means, while tf_idf is the mean of the products
            # (the term r is actually built from).
            n = len(selection.elements)
            tf = (
                sum(
                    term_frequency(sel, candidate, cat, pair_counts)
                    for sel in selection.elements
                )
                / n
            )
            idf = (
                sum(
                    inverse_document_frequency(sel, modality, cat, pair_counts)
                    for sel in selection.elements
                )
                / n
            )
            click.echo(
                "%s\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%d"
                % (element_id, score.p, tf, idf, score.tf_idf, score.r, rank)
            )


@main.group()
def history():
    """Interaction history commands."""


@history.command("dump")
@click.option("--data-dir", "data_dir", required=True, type=click.Path())
@click.option("--user", "user_id", required=True)
def history_dump(data_dir, user_id):
    """Print one user's usage summary, pair counts, and events."""
    events_path = Path(data_dir) / "events.log"
    if not events_path.is_file():
        click.echo("no events log at %s" % events_path, err=True)
        sys.exit(2)
    store = HistoryStore(None, events_path, readonly=True)
    try:
        summary = store.usage_summary(user_id)
        click.echo("user\t%s" % user_id)
        click.echo("messages_sent\t%d" % summary.messages_sent)
        click.echo("emoticons_sent\t%d" % summary.emoticons_sent)
        click.echo(
            "median_timeframe_ms\t%s"
            % ("-" if summary.median_timeframe_ms is None else summary.median_timeframe_ms)
        )
        pairs = store.for_user(user_id)
        for (a, b), count in sorted(pairs.items()):
            click.echo("pair\t%s\t%s\t%d" % (a, b, count))
        for ev in store.events_for(user_id):
            click.echo("event\t%d\t%s\t%s" % (ev.ts_ms, ev.kind.value, ev.payload))
    finally:
        store.close()


if __name__ == "__main__":
    main()
