"""Command-line front end.

Every subcommand reads its inputs, writes data files under ``--out-dir`` and
sends diagnostics to stderr.  Options may also come from a ``key = value``
config file (``--config``); command-line flags take precedence.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import coexpress, cooccur, corpus, fixtures, interactions, netops

logger = logging.getLogger("cooccurnet")


class ConfigError(Exception):
    pass


DEFAULTS = {
    "out_dir": ".",
    "threads": 1,
    "seed": 0,
    "k": [],
    "prob": [],
    "threshold": 0.75,
    "sweep_start": 0.75,
    "sweep_stop": 1.00,
    "sweep_step": 0.01,
    "expression": [],
    "correlations": [],
    "verbs": [],
}

PATH_KEYS = {"corpus", "lexicon", "index", "svo", "network", "reference", "out_dir",
             "expression", "correlations"}
LIST_KEYS = {"k", "prob", "expression", "correlations", "verbs"}


@dataclass
class PipelineConfig:
    command: str
    out_dir: Path = Path(".")
    threads: int = 1
    seed: int = 0
    corpus: Path | None = None
    lexicon: Path | None = None
    index: Path | None = None
    svo: Path | None = None
    network: Path | None = None
    reference: Path | None = None
    expression: list[Path] = field(default_factory=list)
    correlations: list[Path] = field(default_factory=list)
    universe: int | None = None
    k: list[int] = field(default_factory=list)
    prob: list[float] = field(default_factory=list)
    threshold: float = 0.75
    sweep_start: float = 0.75
    sweep_stop: float = 1.00
    sweep_step: float = 0.01
    verbs: list[str] = field(default_factory=list)
    include_known: bool = False

    def require(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"--{name.replace('_', '-')} is required for '{self.command}'")
            if isinstance(value, Path) and not value.exists():
                raise ConfigError(f"{name} path does not exist: {value}")

    def validate(self) -> None:
        for name in ("corpus", "lexicon", "index", "svo", "network", "reference"):
            p = getattr(self, name)
            if p is not None and self.command != "fixture" and not p.exists():
                raise ConfigError(f"{name} path does not exist: {p}")
        for p in self.expression + self.correlations:
            if not p.exists():
                raise ConfigError(f"input path does not exist: {p}")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if any(k < 1 for k in self.k):
            raise ConfigError("k must be >= 1")
        if any(not 0 < p < 1 for p in self.prob):
            raise ConfigError("prob must lie in (0, 1)")
        if not 0 < self.threshold <= 1:
            raise ConfigError("threshold must lie in (0, 1]")
        if self.sweep_step <= 0:
            raise ConfigError("sweep step must be positive")
        if not self.sweep_start < self.sweep_stop:
            raise ConfigError("sweep start must be below sweep stop")
        if self.universe is not None and self.universe < 1:
            raise ConfigError("universe must be >= 1")

    def verb_map(self) -> dict[str, frozenset[str]]:
        vm = dict(interactions.DEFAULT_VERB_MAP)
        for spec in self.verbs:
            kind, sep, forms = spec.partition("=")
            if not sep or not kind.strip():
                raise ConfigError(f"bad verb override {spec!r}; expected kind=verb1,verb2")
            vm[kind.strip()] = frozenset(v.strip().lower() for v in forms.split(",") if v.strip())
        return vm


def read_config_file(path: Path) -> dict[str, object]:
    """Parse ``key = value`` lines; ``verbs.<kind> = a, b`` adds a verb override."""
    values: dict[str, object] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key.startswith("verbs."):
            values.setdefault("verbs", []).append(f"{key[6:]}={value}")
            continue
        if key in LIST_KEYS:
            items = [v for v in value.replace(",", " ").split() if v]
            if key in PATH_KEYS:
                items = [str((path.parent / v)) for v in items]
            values[key] = items
        elif key in PATH_KEYS:
            values[key] = str(path.parent / value)
        else:
            values[key] = value
    return values


def _split_list(values):
    out = []
    for v in values or []:
        out.extend(x for x in str(v).replace(",", " ").split() if x)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--out-dir", type=Path)
    common.add_argument("--threads", type=int, help="worker processes for indexing/counting")
    common.add_argument("--seed", type=int, help="seed for fixture generation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="cooccurnet",
        description="Literature co-occurrence networks as a sieve for co-expression data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="build the occurrence index")
    p.add_argument("--corpus", type=Path)
    p.add_argument("--lexicon", type=Path)

    p = sub.add_parser("cooccur", parents=[common], help="write the co-occurrence table")
    p.add_argument("--index", type=Path)

    p = sub.add_parser("network", parents=[common], help="k-mention / Poisson networks")
    p.add_argument("--index", type=Path)
    p.add_argument("--k", action="append", help="k-mention cutoff(s), e.g. 1,5")
    p.add_argument("--prob", action="append", help="Poisson percentile(s), e.g. 0.95,0.99")

    p = sub.add_parser("annotate", parents=[common], help="annotate a network with SVO interactions")
    p.add_argument("--network", type=Path)
    p.add_argument("--svo", type=Path)
    p.add_argument("--lexicon", type=Path)
    p.add_argument("--verbs", action="append", metavar="KIND=V1,V2",
                   help="replace/add the verb forms of an interaction kind")

    def correlation_inputs(p, threshold_help):
        p.add_argument("--expression", action="append", type=Path, help="expression TSV (repeatable)")
        p.add_argument("--correlations", action="append", type=Path,
                       help="correlation TSV entity_a/entity_b/r (repeatable)")
        p.add_argument("--threshold", type=float, help=threshold_help)
        p.add_argument("--lexicon", type=Path, help="lexicon defining the node universe")
        p.add_argument("--universe", type=int, help="node universe size")

    p = sub.add_parser("coexpress", parents=[common], help="Pearson co-expression networks")
    correlation_inputs(p, "minimum |r| (default 0.75)")

    p = sub.add_parser("sweep", parents=[common], help="threshold sweep against a reference network")
    correlation_inputs(p, "minimum |r| used when computing from expression")
    p.add_argument("--reference", type=Path)
    p.add_argument("--sweep-start", type=float)
    p.add_argument("--sweep-stop", type=float)
    p.add_argument("--sweep-step", type=float)

    p = sub.add_parser("intersect", parents=[common], help="intersect co-expression networks")
    correlation_inputs(p, "minimum |r| (default 0.75)")
    p.add_argument("--reference", type=Path, help="optional network to report overlap against")

    p = sub.add_parser("hypotheses", parents=[common], help="co-expressed pairs absent from the literature")
    correlation_inputs(p, "minimum |r| (default 0.75)")
    p.add_argument("--reference", type=Path)
    p.add_argument("--include-known", action="store_true",
                   help="also list pairs found in the reference (flagged)")

    sub.add_parser("fixture", parents=[common], help="write a small synthetic demo dataset")
    return parser


_CASTS = {"threads": int, "seed": int, "universe": int, "threshold": float,
          "sweep_start": float, "sweep_stop": float, "sweep_step": float}


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    merged: dict[str, object] = dict(DEFAULTS)
    if args.config is not None:
        merged.update(read_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None and value is not False and key not in ("config", "verbose"):
            merged[key] = value
    if getattr(args, "include_known", False):
        merged["include_known"] = True

    kwargs = {"command": args.command}
    try:
        for f in PipelineConfig.__dataclass_fields__:
            if f == "command" or f not in merged:
                continue
            value = merged[f]
            if f in ("k", "prob"):
                cast = int if f == "k" else float
                value = [cast(v) for v in _split_list(value)]
            elif f in ("expression", "correlations"):
                value = [Path(v) for v in value]
            elif f == "verbs":
                value = [str(v) for v in value]
            elif f in PATH_KEYS:
                value = Path(value)
            elif f in _CASTS:
                value = _CASTS[f](value)
            elif f == "include_known":
                value = str(value).lower() in ("1", "true", "yes", "on", "True")
            kwargs[f] = value
    except ValueError as exc:
        raise ConfigError(f"bad parameter value: {exc}") from exc
    unknown = set(merged) - set(PipelineConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = PipelineConfig(**kwargs)
    cfg.validate()
    return cfg


# -- helpers -----------------------------------------------------------------

def _index_path(cfg: PipelineConfig) -> Path:
    return cfg.index if cfg.index is not None else cfg.out_dir / "index.tsv"


def _load_index(cfg: PipelineConfig) -> corpus.OccurrenceIndex:
    path = _index_path(cfg)
    if not path.exists():
        raise ConfigError(f"index not found: {path} (run 'index' first or pass --index)")
    return corpus.read_index(path)


def _universe(cfg: PipelineConfig, node_sets: list[set[str]]) -> int:
    if cfg.universe is not None:
        return cfg.universe
    if cfg.lexicon is not None:
        return len(corpus.read_lexicon(cfg.lexicon))
    nodes = set().union(*node_sets) if node_sets else set()
    return max(1, len(nodes))


def _correlation_networks(cfg: PipelineConfig, extra_nodes: list[set[str]]
                          ) -> list[coexpress.CorrelationNetwork]:
    """Load correlation files and/or compute networks from expression files."""
    if not cfg.expression and not cfg.correlations:
        raise ConfigError("need --expression or --correlations input")
    raw: list[tuple[str, dict, int]] = []
    for path in cfg.correlations:
        net = coexpress.read_correlations(path, threshold=cfg.threshold, name=path.stem)
        raw.append((path.stem, dict(net.edges), 0))
    for path in cfg.expression:
        matrix = coexpress.ingest_expression(path)
        net = coexpress.coexpression_network(matrix, cfg.threshold, name=path.stem)
        logger.info("%s: %d probes x %d samples, %d dropped rows, %d zero-variance pairs, "
                    "%d edges at |r| >= %g", path.name, len(matrix.probes), len(matrix.samples),
                    matrix.dropped, net.skipped, len(net), cfg.threshold)
        raw.append((path.stem, dict(net.edges), net.skipped))
    nodes = [{n for p in edges for n in p} for _, edges, _ in raw]
    universe = _universe(cfg, nodes + extra_nodes)
    return [coexpress.CorrelationNetwork(universe, edges, cfg.threshold, skipped, name)
            for name, edges, skipped in raw]


def _read_reference(cfg: PipelineConfig, universe: int | None = None) -> netops.EdgeSet:
    ref, diag = netops.read_sif(cfg.reference, universe)
    if diag.malformed or diag.self_loops or diag.duplicates:
        logger.warning("reference %s: %d malformed, %d self-loop, %d duplicate lines dropped",
                       cfg.reference, diag.malformed, diag.self_loops, diag.duplicates)
    return ref


def _reference_nodes(cfg: PipelineConfig) -> list[set[str]]:
    if cfg.reference is None:
        return []
    ref, _ = netops.read_sif(cfg.reference)
    return [ref.nodes()]


def _open_out(cfg: PipelineConfig, name: str):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return open(cfg.out_dir / name, "w", encoding="utf-8", newline="\n")


# -- commands ----------------------------------------------------------------

def cmd_index(cfg: PipelineConfig) -> int:
    cfg.require("corpus", "lexicon")
    docs = corpus.read_corpus(cfg.corpus)
    lexicon = corpus.read_lexicon(cfg.lexicon)
    index = corpus.build_index(docs, lexicon, workers=cfg.threads)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_index(index, cfg.out_dir / "index.tsv")
    matched = sum(1 for p in index.postings.values() if p)
    mentions = sum(len(p) for p in index.postings.values())
    with _open_out(cfg, "index_summary.tsv") as fh:
        fh.write("# total_abstracts\tlexicon_size\tentities_matched\tentity_document_hits"
                 "\tduplicate_records\n")
        fh.write(f"{index.total_abstracts}\t{len(lexicon)}\t{matched}\t{mentions}\t{docs.duplicates}\n")
    logger.info("indexed N=%d abstracts, %d/%d entities matched",
                index.total_abstracts, matched, len(lexicon))
    return 0


def cmd_cooccur(cfg: PipelineConfig) -> int:
    index = _load_index(cfg)
    table = cooccur.build_cooccurrence_table(index, workers=cfg.threads)
    with _open_out(cfg, "cooccurrence.tsv") as fh:
        cooccur.write_table(table, fh)
    logger.info("%d co-occurring pairs; max lambda %.6f", len(table), table.max_lambda())
    return 0


def network_label(method: str, param) -> str:
    return f"{param}-mention" if method == "k" else f"poisson-{param:g}"


def cmd_network(cfg: PipelineConfig) -> int:
    index = _load_index(cfg)
    table = cooccur.build_cooccurrence_table(index, workers=cfg.threads)
    methods = [("k", k) for k in cfg.k] + [("p", p) for p in cfg.prob]
    if not methods:
        methods = [("k", 1), ("k", 5), ("p", 0.95), ("p", 0.99)]
    total = netops.edge_universe_size(table.universe)
    with _open_out(cfg, "network_summary.tsv") as summary:
        summary.write("# method\tedges\tpercent_of_full_combination\n")
        summary.write(f"full-combination\t{total}\t100.00\n")
        for method, param in methods:
            if method == "k":
                net = cooccur.k_mention_network(table, param)
            else:
                net = cooccur.poisson_network(table, param)
            label = network_label(method, param)
            netops.write_sif(net, cfg.out_dir / f"network-{label}.sif")
            summary.write(f"{label}\t{len(net)}\t{net.fraction_of_universe():.2f}\n")
            logger.info("%s: %d edges", label, len(net))
    return 0


def cmd_annotate(cfg: PipelineConfig) -> int:
    cfg.require("network", "svo", "lexicon")
    lexicon = corpus.read_lexicon(cfg.lexicon)
    edges, _ = netops.read_sif(cfg.network, universe=cfg.universe or len(lexicon))
    svo = interactions.ingest_svo(cfg.svo)
    verb_map = cfg.verb_map()
    found = interactions.extract_typed_interactions(svo, lexicon, verb_map)
    annotated, stats = interactions.annotate_network(edges, found, kinds=sorted(verb_map))
    with _open_out(cfg, "annotated.sif") as fh:
        interactions.write_annotated_sif(annotated, fh)
    with _open_out(cfg, "concordance.tsv") as fh:
        interactions.write_concordance_report(stats, fh)
    logger.info("%d SVO rows (%d skipped), %d typed interactions, coverage %.2f%%",
                len(svo), svo.skipped, len(found), stats.coverage)
    return 0


def cmd_coexpress(cfg: PipelineConfig) -> int:
    nets = _correlation_networks(cfg, [])
    with _open_out(cfg, "coexpress_summary.tsv") as summary:
        summary.write("# dataset\tthreshold\tedges\tzero_variance_pairs\n")
        for net in nets:
            with _open_out(cfg, f"{net.name}.cor.tsv") as fh:
                coexpress.write_correlations(net, fh)
            summary.write(f"{net.name}\t{cfg.threshold:g}\t{len(net)}\t{net.skipped}\n")
    return 0


def cmd_sweep(cfg: PipelineConfig) -> int:
    cfg.require("reference")
    if cfg.expression or cfg.correlations:
        # the sweep must see every pair down to its starting threshold
        cfg.threshold = min(cfg.threshold, cfg.sweep_start)
    nets = _correlation_networks(cfg, _reference_nodes(cfg))
    if len(nets) != 1:
        raise ConfigError("sweep takes exactly one correlation input")
    ref = _read_reference(cfg, nets[0].universe)
    rows = coexpress.threshold_sweep(nets[0], ref, cfg.sweep_start, cfg.sweep_stop, cfg.sweep_step)
    with _open_out(cfg, "sweep.tsv") as fh:
        coexpress.write_sweep(rows, fh)
    with _open_out(cfg, "sweep_curve.tsv") as fh:
        coexpress.write_curve(rows, fh)
    return 0


def cmd_intersect(cfg: PipelineConfig) -> int:
    nets = _correlation_networks(cfg, _reference_nodes(cfg))
    shared = coexpress.intersect_networks(nets)
    netops.write_sif(shared, cfg.out_dir / "intersect.sif")
    logger.info("%d pairs shared by all %d networks", len(shared), len(nets))
    if cfg.reference is not None:
        ref = _read_reference(cfg, shared.universe)
        with _open_out(cfg, "intersect_overlap.tsv") as fh:
            netops.write_overlap_report(
                [("intersection", cfg.reference.name, netops.overlap_stats(shared, ref))], fh)
    return 0


def cmd_hypotheses(cfg: PipelineConfig) -> int:
    cfg.require("reference")
    nets = _correlation_networks(cfg, _reference_nodes(cfg))
    ref = _read_reference(cfg, nets[0].universe)
    pairs = coexpress.intersect_networks(nets).edges if len(nets) > 1 else set(nets[0].edges)

    rows = []
    for pair in pairs:
        strengths = [net.edges[pair] for net in nets]
        known = pair in ref.edges
        if known and not cfg.include_known:
            continue
        rows.append((min(abs(r) for r in strengths), pair, strengths, known))
    rows.sort(key=lambda row: (-row[0], row[1]))

    names = [net.name or f"dataset{i + 1}" for i, net in enumerate(nets)]
    with _open_out(cfg, "hypotheses.tsv") as fh:
        fh.write("# entity_a\tentity_b\tmin_abs_r\t"
                 + "\t".join(f"r_{n}" for n in names) + "\tin_literature\n")
        if not rows:
            logger.info("no co-expressed pair is absent from the reference network")
        for min_r, (a, b), strengths, known in rows:
            fh.write(f"{a}\t{b}\t{min_r:.6f}\t" + "\t".join(f"{r:.6f}" for r in strengths)
                     + f"\t{'yes' if known else 'no'}\n")
    logger.info("%d candidate pairs written", sum(1 for r in rows if not r[3]))
    return 0


def cmd_fixture(cfg: PipelineConfig) -> int:
    """Write a small self-consistent demo dataset."""
    fx = fixtures.sparse_corpus(cfg.seed)
    expr = [fixtures.planted_expression(cfg.seed + i, [0.99, 0.95, 0.9, 0.85, 0.8], n_noise=10)
            for i in range(2)]
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for name, lines in [("corpus.tsv", fx.corpus_lines()), ("lexicon.tsv", fx.lexicon_lines()),
                        ("svo.tsv", fx.svo_lines()), ("expression_a.tsv", expr[0].lines()),
                        ("expression_b.tsv", expr[1].lines())]:
        with _open_out(cfg, name) as fh:
            fh.writelines(lines)
    return 0


COMMANDS = {
    "index": cmd_index,
    "cooccur": cmd_cooccur,
    "network": cmd_network,
    "annotate": cmd_annotate,
    "coexpress": cmd_coexpress,
    "sweep": cmd_sweep,
    "intersect": cmd_intersect,
    "hypotheses": cmd_hypotheses,
    "fixture": cmd_fixture,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"cooccurnet {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"cooccurnet {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
