"""Command-line entry point: estimate | generate | evaluate | errors | report.

Configuration precedence is flags > config file > defaults; the config file
is flat key=value text. Exit codes are a stable scripting contract:
0 success, 2 config/input error, 3 empty evaluation, 4 provider failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import errors as error_analysis
from .evaluation import (
    EmptyEvaluationError,
    EvaluationReport,
    emit_figure_data,
    emit_report,
    evaluate_all,
    load_report,
)
from .generate import generate_definitions
from .lexicon import (
    LexigenError,
    append_dictionary,
    load_dictionary,
    load_lemma_list,
    load_reference_dictionary,
)
from .prompts import (
    BatchConfig,
    DEFAULT_TEMPLATE_ID,
    DEFAULT_THROUGHPUT_PRESETS,
    estimate_cost,
    get_template,
    load_throughput_presets,
    preset_for_match_size,
)
from .providers import (
    API_KEY_ENV,
    HttpCompletionProvider,
    HttpEmbeddingProvider,
    MockCompletionProvider,
    MockEmbeddingProvider,
    ProviderError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EMPTY_EVAL = 3
EXIT_PROVIDER = 4


@dataclass
class RunConfig:
    template: str = DEFAULT_TEMPLATE_ID
    match_size: int = 1
    max_tokens: int | None = None
    temperature: float = 0.5
    price_per_1k_tokens_eur: float = 0.02
    mode: str = "mock"
    endpoint: str | None = None
    seed: int = 0
    workers: int = 4
    presets: str | None = None

    def resolved_max_tokens(self) -> int:
        if self.max_tokens is not None:
            return self.max_tokens
        for row in self.throughput_presets():
            if row.match_size == self.match_size:
                return row.max_tokens
        return max(100, 250 * self.match_size)

    def throughput_presets(self):
        if self.presets:
            return load_throughput_presets(self.presets)
        return DEFAULT_THROUGHPUT_PRESETS

    def batch_config(self) -> BatchConfig:
        return BatchConfig(
            match_size=self.match_size,
            max_tokens=self.resolved_max_tokens(),
            temperature=self.temperature,
            price_per_1k_tokens_eur=self.price_per_1k_tokens_eur,
        )

    def validate(self) -> None:
        if self.mode not in ("mock", "live"):
            raise LexigenError(f"mode must be 'mock' or 'live', not {self.mode!r}")
        if self.mode == "live":
            if not self.endpoint:
                raise LexigenError("live mode requires --endpoint")
            if not os.environ.get(API_KEY_ENV):
                raise LexigenError(f"live mode requires the {API_KEY_ENV} environment variable")


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"match_size", "max_tokens", "seed", "workers"}
_FLOAT_KEYS = {"temperature", "price_per_1k_tokens_eur"}


def parse_config_file(path: str | Path) -> dict:
    """Flat key=value lines; '#' comments and blank lines ignored."""
    values: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LexigenError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_TYPES:
            raise LexigenError(f"{path}:{line_no}: unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise LexigenError(f"{path}:{line_no}: bad value for {key}: {exc}") from exc
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if args.config:
        config = replace(config, **parse_config_file(args.config))
    overrides = {
        name: getattr(args, name)
        for name in _CONFIG_TYPES
        if getattr(args, name, None) is not None
    }
    config = replace(config, **overrides)
    config.validate()
    return config


def _completion_provider(config: RunConfig):
    if config.mode == "mock":
        return MockCompletionProvider(seed=config.seed)
    return HttpCompletionProvider(config.endpoint, api_key=os.environ.get(API_KEY_ENV))


def _embedding_provider(config: RunConfig):
    if config.mode == "mock":
        return MockEmbeddingProvider(seed=config.seed)
    return HttpEmbeddingProvider(config.endpoint, api_key=os.environ.get(API_KEY_ENV))


def cmd_estimate(args: argparse.Namespace) -> int:
    config = build_config(args)
    result = load_lemma_list(args.lemmas)
    n = len(result.lemmas)
    presets = config.throughput_presets()
    print(f"{n} lemmas ({result.duplicates_dropped} duplicates dropped)")
    print(f"{'match':>6} {'max_tok':>8} {'per_half_h':>11} {'price_eur':>10} {'cents_per_lemma':>16}")
    for row in presets:
        estimate = estimate_cost(n, row)
        marker = " <- selected" if row.match_size == config.match_size else ""
        print(
            f"{row.match_size:>6} {row.max_tokens:>8} {row.processed_per_half_hour:>11} "
            f"{row.price_per_half_hour_eur:>10.2f} {estimate.cents_per_lemma:>16.4f}{marker}"
        )
    selected = estimate_cost(n, preset_for_match_size(config.match_size, presets))
    print(
        f"selected match size {config.match_size}: total €{selected.total_eur:.2f}, "
        f"cents_per_lemma {selected.cents_per_lemma:.4f}, "
        f"about {selected.est_wall_hours:.1f} h"
    )
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    config = build_config(args)
    result = load_lemma_list(args.lemmas)
    template = get_template(config.template, batched=config.match_size > 1)
    out_path = Path(args.out)

    already_done: set[str] = set()
    if out_path.exists():
        already_done = {record.lemma.surface for record in load_dictionary(out_path)}

    provider = _completion_provider(config)
    summary = generate_definitions(
        result.lemmas,
        template,
        config.batch_config(),
        provider,
        workers=config.workers,
        already_done=already_done,
    )
    append_dictionary(summary.records, out_path)
    print(
        f"generated: {summary.generated}  skipped: {summary.skipped}  "
        f"retried: {summary.retried}  failed: {summary.failed}"
    )
    for surface, reason in summary.failures:
        print(f"failed lemma {surface!r}: {reason}")
    if summary.terminal_error is not None:
        print(f"provider failure: {summary.terminal_error}", file=sys.stderr)
        print(f"partial output preserved in {out_path}", file=sys.stderr)
        return EXIT_PROVIDER
    return EXIT_OK


def _print_monosemy(report: EvaluationReport) -> None:
    mono = report.monosemy
    if mono is None:
        print("monosemy: no evaluable lemmas")
        return
    agg = mono.aggregate
    print(f"monosemy (n={mono.n})")
    print(f"  {'cumulative BLEU':<18} {agg.bleu_cumulative:.4f}")
    print(f"  {'1-gram BLEU':<18} {agg.bleu_1gram:.4f}")
    print(f"  {'Levenshtein':<18} {agg.levenshtein:.2f}")
    print(f"  {'Jaccard':<18} {agg.jaccard:.4f}")
    print("  definition lengths (mean/sd): "
          f"reference words {mono.ref_lengths.mean_words:.1f}/{mono.ref_lengths.sd_words:.1f}, "
          f"chars {mono.ref_lengths.mean_chars:.1f}/{mono.ref_lengths.sd_chars:.1f}; "
          f"generated words {mono.gen_lengths.mean_words:.1f}/{mono.gen_lengths.sd_words:.1f}, "
          f"chars {mono.gen_lengths.mean_chars:.1f}/{mono.gen_lengths.sd_chars:.1f}")
    print(f"  {'POS':<12} {'cosine':>8} {'% of total':>11}")
    print(f"  {'all':<12} {agg.cosine:>8.4f} {100.0:>11.2f}")
    for pos, breakdown in mono.by_pos.items():
        print(
            f"  {pos.name.lower() + 's':<12} {breakdown.mean_cosine:>8.4f} "
            f"{breakdown.share_of_total:>11.2f}"
        )


def _print_polysemy(report: EvaluationReport) -> None:
    poly = report.polysemy
    if poly is None:
        print("polysemy: no evaluable lemmas")
        return
    print(f"polysemy (n={poly.n}): mean best cosine {poly.mean_best_cosine:.4f}")
    print(f"  {'sense_id':>8} {'count':>6} {'mean best cosine':>17}")
    for sense_id, count in poly.match_histogram.items():
        print(
            f"  {sense_id:>8} {count:>6} "
            f"{poly.mean_best_cosine_by_sense_id[sense_id]:>17.4f}"
        )


def _print_errors(stats: error_analysis.ErrorStats) -> None:
    print(f"error labels over {stats.total} definitions")
    for label, (count, fraction) in stats.per_label.items():
        print(f"  {label.value:<24} {count:>5}  {fraction * 100:>6.2f}%")


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = build_config(args)
    records = load_dictionary(args.dictionary)
    refs = load_reference_dictionary(args.refs)
    embedder = _embedding_provider(config)
    try:
        outcome = evaluate_all(records, refs, embedder)
    except EmptyEvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_EVAL

    labeled = error_analysis.classify_dictionary(records)
    stats = error_analysis.summarize(
        [(record.lemma, labels) for record, labels in labeled]
    )
    meta = {
        "templates": sorted({record.prompt_id for record in records}),
        "mode": config.mode,
        "seed": config.seed,
        "match_size": config.match_size,
        "max_tokens": config.resolved_max_tokens(),
        "temperature": config.temperature,
    }
    report = EvaluationReport(
        monosemy=outcome.monosemy,
        polysemy=outcome.polysemy,
        skipped=outcome.skipped,
        meta=meta,
        errors=error_analysis.stats_to_json(stats),
    )
    report_path = Path(args.out)
    _path, records_path = emit_report(report, outcome.records, report_path)
    figure_path = report_path.with_name(report_path.stem + ".figure.csv")
    emit_figure_data(outcome.polysemy, figure_path)

    _print_monosemy(report)
    _print_polysemy(report)
    _print_errors(stats)
    print(f"skipped (not in reference): {outcome.skipped}")
    print(f"report: {report_path}\nrecords: {records_path}\nfigure data: {figure_path}")
    return EXIT_OK


def cmd_errors(args: argparse.Namespace) -> int:
    records = load_dictionary(args.dictionary)
    template = get_template(args.audit_template) if args.audit_template else None
    labeled = error_analysis.classify_dictionary(records, template=template)
    stats = error_analysis.summarize([(record.lemma, labels) for record, labels in labeled])
    _print_errors(stats)
    if args.out:
        Path(args.out).write_text(
            json.dumps(error_analysis.stats_to_json(stats), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"error stats: {args.out}")
    if args.verbose:
        for record, labels in labeled:
            if labels:
                names = ", ".join(sorted(label.value for label in labels))
                print(f"{record.lemma.surface}: {names}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    _print_monosemy(report)
    _print_polysemy(report)
    print(f"skipped (not in reference): {report.skipped}")
    print(f"meta: {report.meta}")
    return EXIT_OK


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--template", help="prompt template id")
    parser.add_argument("--match-size", dest="match_size", type=int)
    parser.add_argument("--max-tokens", dest="max_tokens", type=int)
    parser.add_argument("--temperature", type=float, help="sampling temperature (default 0.5)")
    parser.add_argument("--mode", choices=["mock", "live"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--endpoint", help="provider base URL for live mode")
    parser.add_argument("--presets", help="throughput preset file (JSON lines)")
    parser.add_argument(
        "--price-per-1k-tokens",
        dest="price_per_1k_tokens_eur",
        type=float,
        help="euros per 1000 tokens for per-record cost accounting",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexigen",
        description="Generate a dictionary with a completion provider and evaluate it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_estimate = sub.add_parser("estimate", help="project run cost from throughput presets")
    p_estimate.add_argument("--lemmas", required=True)
    _add_config_flags(p_estimate)
    p_estimate.set_defaults(func=cmd_estimate)

    p_generate = sub.add_parser("generate", help="generate definitions for a lemma list")
    p_generate.add_argument("--lemmas", required=True)
    p_generate.add_argument("--out", required=True, help="dictionary output (JSON lines)")
    _add_config_flags(p_generate)
    p_generate.set_defaults(func=cmd_generate)

    p_evaluate = sub.add_parser("evaluate", help="score a dictionary against references")
    p_evaluate.add_argument("--dictionary", required=True)
    p_evaluate.add_argument("--refs", required=True)
    p_evaluate.add_argument("--out", required=True, help="report path (JSON)")
    _add_config_flags(p_evaluate)
    p_evaluate.set_defaults(func=cmd_evaluate)

    p_errors = sub.add_parser("errors", help="run the error taxonomy over a dictionary")
    p_errors.add_argument("--dictionary", required=True)
    p_errors.add_argument("--out", help="write stats JSON here")
    p_errors.add_argument("--audit-template", help="audit this template id for unquoted lemmas")
    p_errors.add_argument("--verbose", action="store_true", help="list labeled lemmas")
    p_errors.set_defaults(func=cmd_errors)

    p_report = sub.add_parser("report", help="pretty-print a previously written report")
    p_report.add_argument("--report", required=True)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (LexigenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
