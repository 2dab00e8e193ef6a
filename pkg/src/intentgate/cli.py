"""Experiment CLI: corpus generation, training, bootstrapping, calibration,
evaluation, batch simulation, and serving the gateway."""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

import click

from . import bridge, calibration, metrics, nlu, synth
from .config import GatewayConfig
from .data import JointLabel, read_corpus, write_corpus


def _parse_ngram(value: str) -> tuple[int, int]:
    parts = value.split(",")
    if len(parts) == 1:
        lo = hi = int(parts[0])
    elif len(parts) == 2:
        lo, hi = int(parts[0]), int(parts[1])
    else:
        raise click.BadParameter("expected N or LO,HI")
    if lo < 1 or hi < lo:
        raise click.BadParameter("expected 1 <= LO <= HI")
    return lo, hi


def _scored_items(model: nlu.ClassifierModel, corpus) -> list[tuple[float, bool]]:
    items = []
    for ex in corpus:
        pred = model.predict_text(ex.text)
        items.append((pred.confidence, pred.best == ex.label))
    return items


@click.group()
def main() -> None:
    """Confidence-gated multilingual intent routing gateway."""


@main.command("gen-corpus")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--labels", "n_labels", type=int, default=24, show_default=True)
@click.option("--train-size", type=int, default=2000, show_default=True)
@click.option("--test-size", type=int, default=500, show_default=True)
@click.option("--source-lang", default="en", show_default=True)
@click.option("--target-lang", default="es", show_default=True)
def gen_corpus(out_dir, seed, n_labels, train_size, test_size, source_lang, target_lang):
    """Emit a seeded synthetic bilingual corpus with clean and lossy lexicons."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corp = synth.generate(
        seed=seed,
        n_labels=n_labels,
        train_size=train_size,
        test_size=test_size,
        source_lang=source_lang,
        target_lang=target_lang,
    )
    write_corpus(corp.source_train, out / "source_train.jsonl")
    write_corpus(corp.target_train, out / "target_train.jsonl")
    write_corpus(corp.target_test, out / "target_test.jsonl")
    corp.lexicon_clean.save(out / "lexicon_clean.tsv")
    corp.lexicon_lossy.save(out / "lexicon_lossy.tsv")
    corp.lexicon_reverse_clean.save(out / "lexicon_reverse_clean.tsv")
    corp.lexicon_reverse_lossy.save(out / "lexicon_reverse_lossy.tsv")
    corp.catalog.save(out / "catalog.json")
    click.echo(f"wrote corpus with {n_labels} joint labels to {out}")


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--ngram", default="1,2", show_default=True, help="n-gram range N or LO,HI")
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--reg", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train(corpus_path, out_path, ngram, epochs, reg, seed):
    """Train an intent model on a labeled corpus (n-best lists are expanded)."""
    corpus = read_corpus(corpus_path)
    flat, skipped = calibration.expand_nbest(corpus)
    if skipped:
        click.echo(f"warning: skipped {skipped} examples with no hypotheses", err=True)
    model = nlu.train(flat, n_range=_parse_ngram(ngram), epochs=epochs, reg=reg, seed=seed)
    model.save(out_path)
    click.echo(f"trained on {len(flat)} examples, {len(model.labels)} labels -> {out_path}")


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True,
              help="source-language training corpus")
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True), required=True)
@click.option("--src", default="en", show_default=True)
@click.option("--tgt", default="es", show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--ngram", default="1,2", show_default=True)
@click.option("--epochs", type=int, default=30, show_default=True)
@click.option("--reg", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--p-dup", type=float, default=0.0, show_default=True,
              help="token duplication probability in the lexicon translator")
def bootstrap(corpus_path, lexicon_path, src, tgt, out_path, ngram, epochs, reg, seed, p_dup):
    """Translate a source-language corpus offline and train a target model."""
    corpus, skipped = calibration.expand_nbest(read_corpus(corpus_path))
    if skipped:
        click.echo(f"warning: skipped {skipped} examples with no hypotheses", err=True)
    lexicon = bridge.TranslationLexicon.load(lexicon_path)
    translator = bridge.LexiconTranslator(lexicon, src=src, tgt=tgt, seed=seed, p_dup=p_dup)
    result = bridge.bootstrap_offline(
        corpus, translator, src, tgt,
        n_range=_parse_ngram(ngram), epochs=epochs, reg=reg, seed=seed,
    )
    result.model.save(out_path)
    click.echo(
        f"bootstrapped {src}->{tgt} model on {len(result.translated_corpus)} translated "
        f"examples (mean MT confidence {result.mean_mt_confidence:.2f}, "
        f"{len(result.failed_utterances)} failures) -> {out_path}"
    )


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True,
              help="labeled dev corpus for threshold calibration")
@click.option("--max-rejection", type=float, default=0.2, show_default=True)
@click.option("--cost-per-reject", type=float, default=1.0, show_default=True)
@click.option("--stage", default="nlu", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write the key-value calibration block here")
def calibrate(model_path, corpus_path, max_rejection, cost_per_reject, stage, out_path):
    """Pick the rejection threshold maximizing accepted-set accuracy."""
    model = nlu.ClassifierModel.load(model_path)
    dev, _ = calibration.expand_nbest(read_corpus(corpus_path))
    report = calibration.calibrate_threshold(
        _scored_items(model, dev), max_rejection=max_rejection, cost_per_reject=cost_per_reject
    )
    block = report.to_kv(stage)
    if out_path:
        Path(out_path).write_text(block, encoding="utf-8")
    click.echo(block, nl=False)


@main.command()
@click.option("--model", "models", multiple=True, required=True,
              help="NAME=PATH; repeat for several models")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--points", default="0,0.1,0.2", show_default=True)
@click.option("--agreement/--no-agreement", default=False,
              help="emit the 2x2 correctness table for exactly two models")
@click.option("--out", "out_path", type=click.Path(), default=None)
def evaluate(models, corpus_path, points, agreement, out_path):
    """Emit error-rejection report rows (and optionally a model-agreement table)."""
    corpus = read_corpus(corpus_path)
    fractions = [float(p) for p in points.split(",")]
    named = []
    for spec_arg in models:
        if "=" not in spec_arg:
            raise click.BadParameter("--model expects NAME=PATH")
        name, path = spec_arg.split("=", 1)
        named.append((name, nlu.ClassifierModel.load(path)))

    rows = []
    for name, model in named:
        curve = metrics.error_rejection_curve(_scored_items(model, corpus), fractions)
        rows.append((name, curve))
    output = metrics.format_rejection_csv(rows, fractions)

    if agreement:
        if len(named) != 2:
            raise click.UsageError("--agreement requires exactly two --model entries")
        gold = [ex.label for ex in corpus]
        preds = [
            [model.predict_text(ex.text).best for ex in corpus] for _, model in named
        ]
        output += "\n" + metrics.format_agreement_csv(
            metrics.agreement_table(preds[0], preds[1], gold)
        )

    if out_path:
        Path(out_path).write_text(output, encoding="utf-8")
    click.echo(output, nl=False)


@main.command("mt-quality")
@click.option("--refs", "refs_path", type=click.Path(exists=True), required=True,
              help="reference translations, one utterance per line")
@click.option("--hyps", "hyps_path", type=click.Path(exists=True), required=True)
@click.option("--name", default="MT outputs", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def mt_quality(refs_path, hyps_path, name, out_path):
    """Score translations with BLEU, TER, and length ratio."""
    refs = [line.split() for line in Path(refs_path).read_text(encoding="utf-8").splitlines()]
    hyps = [line.split() for line in Path(hyps_path).read_text(encoding="utf-8").splitlines()]
    if len(refs) != len(hyps):
        raise click.UsageError("refs and hyps must have the same number of lines")
    output = metrics.format_mt_quality_csv([(name, metrics.mt_quality(refs, hyps))])
    if out_path:
        Path(out_path).write_text(output, encoding="utf-8")
    click.echo(output, nl=False)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write disposition statistics as JSON")
def simulate(config_path, corpus_path, out_path):
    """Route a whole batch through the gateway pipeline and report outcomes."""
    cfg = GatewayConfig.load(config_path)
    log_fh = open(cfg.event_log, "a", encoding="utf-8") if cfg.event_log else None
    try:
        rt = cfg.build_router(log_file=log_fh)
        corpus = read_corpus(corpus_path)
        outcomes = Counter()
        correct = 0
        automated = 0
        for ex in corpus:
            disp = rt.route(ex.id, ex.text)
            outcomes[disp.outcome] += 1
            if not disp.pending:
                automated += 1
                if disp.joint_label() == ex.label:
                    correct += 1
        stats = {
            "batch_size": len(corpus),
            "outcomes": dict(outcomes),
            "automation_rate": automated / len(corpus) if corpus else 0.0,
            "automated_accuracy": correct / automated if automated else None,
            "queues": rt.queue_stats(),
        }
    finally:
        if log_fh:
            log_fh.close()
    text = json.dumps(stats, indent=2)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    click.echo(text)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
def serve(config_path):
    """Run the gateway service."""
    import uvicorn

    from .service import create_app

    cfg = GatewayConfig.load(config_path)
    log_fh = open(cfg.event_log, "a", encoding="utf-8") if cfg.event_log else None
    app = create_app(cfg.build_router(log_file=log_fh))
    try:
        uvicorn.run(app, host=cfg.listen_host, port=cfg.listen_port)
    finally:
        if log_fh:
            log_fh.close()


@main.command()
@click.option("--corpus", "corpora", multiple=True, required=True,
              help="NAME=PATH; repeat for several corpora")
@click.option("--out", "out_path", type=click.Path(), default=None)
def report(corpora, out_path):
    """Corpus statistics table: utterances, words, and unique joint labels."""
    rows = []
    for spec_arg in corpora:
        if "=" not in spec_arg:
            raise click.BadParameter("--corpus expects NAME=PATH")
        name, path = spec_arg.split("=", 1)
        if not Path(path).is_file():
            click.echo(f"error: unreadable corpus file {path}", err=True)
            sys.exit(1)
        rows.append((name, metrics.corpus_stats(read_corpus(path))))
    output = metrics.format_stats_csv(rows)
    if out_path:
        Path(out_path).write_text(output, encoding="utf-8")
    click.echo(output, nl=False)


if __name__ == "__main__":
    main()
