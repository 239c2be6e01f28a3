"""Command-line pipelines: ``polnet discourse``, ``polnet network``, ``polnet sbm``.

Every run writes into a temporary sibling of the output directory and renames
it into place only after all files are written, so a failed run leaves no
partial bundle behind. All randomness comes from ``--seed``; per-task seeds are
derived by hashing ``(seed, task, index)``.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import os
import shutil
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import __version__
from . import graphstats as gs
from .corpus import (
    UNICODE_POLICIES,
    PreprocessConfig,
    concat_documents,
    load_stopwords,
    read_corpus,
    tokenize,
    top_terms,
    vocab_report,
)
from .exceptions import ConfigurationError, GraphSizeError, PolnetError, ValidationError
from .io import EXPORT_SUFFIX, export_graph, load_adjacency, load_graph, write_csv, write_json
from .sbm import GOF_STATISTICS, FitConfig, canonicalize, gof, select_k
from .sentiment import load_lexicon, score
from .wordgraph import giant_component, word_graph

__all__ = ["RunConfig", "derive_seed", "parse_k_range", "load_config", "main"]

GRAPH_KINDS = ("bigram", "bigram_skipgram")
_COMMON = ("command", "seed", "export_format")
_SETTINGS = {
    "discourse": _COMMON + (
        "docs", "stopwords", "lexicon", "sentiment", "merge", "unicode_policy", "min_weight",
        "export_min_weight", "skipgrams", "top_n", "top_central", "distinct_polarity", "clique_cap",
    ),
    "network": _COMMON + ("edges", "vertices", "top", "clique_cap"),
    "sbm": _COMMON + ("edges", "k_range", "restarts", "tol", "max_iter", "n_sims"),
}
_PATH_KEYS = ("docs", "stopwords", "lexicon", "edges", "out")


@dataclass(frozen=True)
class RunConfig:
    command: str
    out: str
    seed: int = 0
    # discourse
    docs: str | None = None
    stopwords: str | None = None
    lexicon: str | None = None
    sentiment: bool = True
    merge: tuple = ()
    unicode_policy: str = "keep-spanish-letters"
    min_weight: int = 1
    export_min_weight: int = 1
    skipgrams: bool = True
    top_n: int = 25
    top_central: int = 10
    distinct_polarity: bool = False
    # network
    edges: str | None = None
    vertices: tuple = ()
    top: int | None = None
    clique_cap: int = gs.DEFAULT_CLIQUE_CAP
    # sbm
    k_range: str = "1:6"
    restarts: int = 20
    tol: float = 1e-6
    max_iter: int = 500
    n_sims: int = 1000
    export_format: str = "graphml"
    force: bool = False

    def validate(self):
        required = {
            "discourse": ("docs", "stopwords"),
            "network": ("edges",),
            "sbm": ("edges",),
        }[self.command]
        for key in required:
            if getattr(self, key) is None:
                raise ConfigurationError(f"{self.command}: missing required setting {key!r}")
        for key in ("docs", "stopwords", "lexicon", "edges"):
            p = getattr(self, key)
            if p is not None and not Path(p).exists():
                raise ConfigurationError(f"{key}: path does not exist: {p}")
        if self.command == "discourse":
            if self.sentiment and self.lexicon is None:
                raise ConfigurationError("sentiment scoring requested but no lexicon given (use --no-sentiment to skip)")
            if self.unicode_policy not in UNICODE_POLICIES:
                raise ConfigurationError(f"unicode_policy must be one of {UNICODE_POLICIES}")
        if self.export_format not in EXPORT_SUFFIX:
            raise ConfigurationError(f"export_format must be one of {sorted(EXPORT_SUFFIX)}")
        for key in ("min_weight", "export_min_weight", "top_n", "top_central", "restarts", "max_iter"):
            if getattr(self, key) < 1:
                raise ConfigurationError(f"{key} must be >= 1")
        if self.top is not None and self.top < 1:
            raise ConfigurationError("top must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.command == "sbm":
            parse_k_range(self.k_range)
        return self

    def as_dict(self):
        # the output location is left out so bundles written to different
        # directories compare equal
        d = {k: getattr(self, k) for k in _SETTINGS[self.command]}
        for k in ("merge", "vertices"):
            if k in d:
                d[k] = list(d[k])
        return d


def derive_seed(seed: int, task: str, index: int = 0) -> int:
    """Stable 62-bit sub-seed for ``task``; leaves headroom for ``+ i`` offsets."""
    digest = hashlib.sha256(f"{seed}:{task}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 2


def parse_k_range(text) -> tuple[int, int]:
    """``"2"``, ``"1:6"`` or ``"1..6"`` (inclusive) to ``(lo, hi)``."""
    if isinstance(text, (list, tuple)) and len(text) == 2:
        lo, hi = text
    else:
        s = str(text).strip().replace("..", ":").replace("-", ":")
        parts = s.split(":")
        try:
            if len(parts) == 1:
                lo = hi = int(parts[0])
            elif len(parts) == 2:
                lo, hi = int(parts[0]), int(parts[1])
            else:
                raise ValueError
        except ValueError:
            raise ConfigurationError(f"invalid k_range {text!r}; expected 'lo:hi'") from None
    if lo < 1 or hi < lo:
        raise ConfigurationError(f"invalid k_range {text!r}; need 1 <= lo <= hi")
    return int(lo), int(hi)


def load_config(path) -> dict:
    """Read a YAML or JSON mapping; relative paths resolve against its directory."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"{path}: cannot read config: {e}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: config must be a key-value mapping")
    out = {}
    for key, value in data.items():
        key = str(key).replace("-", "_")
        if key in _PATH_KEYS and value is not None:
            value = str(path.parent / value) if not Path(value).is_absolute() else str(value)
        out[key] = value
    return out


def _build_config(args) -> RunConfig:
    values = {}
    if args.config is not None:
        values.update(load_config(args.config))
    for key, value in vars(args).items():
        if key == "config" or value is None:
            continue
        values[key] = value
    values["command"] = args.command
    if args.command == "sbm" and "seed" not in values:
        raise ConfigurationError("sbm requires --seed (or 'seed' in the config file)")
    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(values) - names)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {unknown}")
    if "out" not in values:
        raise ConfigurationError("missing required setting 'out'")
    for key in ("merge", "vertices"):
        if key in values:
            v = values[key]
            values[key] = tuple([v] if isinstance(v, str) else v)
    try:
        return RunConfig(**values).validate()
    except TypeError as e:
        raise ConfigurationError(str(e)) from None


@contextmanager
def _atomic_output(out, force):
    out = Path(out)
    if out.exists() and any(out.iterdir()) and not force:
        raise ConfigurationError(f"output directory {out} is not empty (use --force to replace it)")
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.tmp-", dir=out.parent))
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    if out.exists():
        shutil.rmtree(out)
    os.replace(tmp, out)
    os.chmod(out, 0o755)


def _write_run_config(tmp, cfg, **derived):
    d = {"polnet_version": __version__, **cfg.as_dict()}
    if derived:
        d["derived_seeds"] = derived
    write_json(tmp / "run_config.json", d)


# discourse ---------------------------------------------------------------


def _parse_merges(specs, ids):
    groups = {}
    used = set()
    for spec in specs:
        name, sep, members = spec.partition("=")
        members = [m.strip() for m in members.split(",") if m.strip()]
        if not sep or not name.strip() or not members:
            raise ConfigurationError(f"invalid merge {spec!r}; expected 'id=doc1,doc2'")
        for m in members:
            if m not in ids:
                raise ConfigurationError(f"merge {spec!r}: unknown document {m!r}")
            if m in used:
                raise ConfigurationError(f"document {m!r} appears in more than one merge")
            used.add(m)
        groups[name.strip()] = members
    return groups


def _assemble(docs, merges):
    by_id = {d.id: d for d in docs}
    groups = _parse_merges(merges, by_id)
    merged = {m for ms in groups.values() for m in ms}
    out = [d for d in docs if d.id not in merged]
    for name, members in groups.items():
        if name in {d.id for d in out}:
            raise ConfigurationError(f"merged id {name!r} collides with an existing document")
        out.append(concat_documents([by_id[m] for m in members], name))
    return sorted(out, key=lambda d: d.id)


def _giant_summary(g, cap):
    giant = giant_component(g)
    try:
        return giant, gs.summarize(giant, clique_cap=cap)
    except GraphSizeError:
        return giant, None


def cmd_discourse(cfg: RunConfig, tmp: Path):
    docs = read_corpus(cfg.docs)
    if not docs:
        raise ValidationError(f"no documents found in {cfg.docs}")
    docs = _assemble(docs, cfg.merge)
    pre = PreprocessConfig(stopwords=load_stopwords(cfg.stopwords), unicode_policy=cfg.unicode_policy)
    streams = [tokenize(d, pre) for d in docs]
    _write_run_config(tmp, cfg)

    report = vocab_report(streams)
    write_json(tmp / "vocab.json", report.as_dict())
    write_csv(
        tmp / "vocab.csv",
        ["doc_id", "raw_token_count", "retained_token_count", "distinct_count", "distinct_fraction"],
        [(r.doc_id, r.raw_token_count, r.retained_token_count, r.distinct_count, r.distinct_fraction) for r in report.rows],
    )
    write_csv(
        tmp / "top_terms.csv",
        ["doc_id", "rank", "term", "frequency"],
        [(s.doc_id, i, t, c) for s in streams for i, (t, c) in enumerate(top_terms(s, cfg.top_n), 1)],
    )

    if cfg.sentiment:
        lexicon = load_lexicon(cfg.lexicon)
        polarity = [score(s, lexicon, top_n=cfg.top_n, distinct=cfg.distinct_polarity) for s in streams]
        write_json(tmp / "polarity.json", [p.as_dict() for p in polarity])
        write_csv(
            tmp / "polarity.csv",
            ["doc_id", "positive_pct", "negative_pct", "matched_count"],
            [(p.doc_id, p.positive_pct, p.negative_pct, p.matched_count) for p in polarity],
        )
        rows = []
        for p in polarity:
            for label, terms in (("positive", p.top_positive), ("negative", p.top_negative)):
                rows += [(p.doc_id, label, i, t, c) for i, (t, c) in enumerate(terms, 1)]
        write_csv(tmp / "polarity_terms.csv", ["doc_id", "polarity", "rank", "term", "frequency"], rows)

    graphs_dir = tmp / "graphs"
    graphs_dir.mkdir()
    suffix = EXPORT_SUFFIX[cfg.export_format]
    columns, summaries, eig_rows = [], [], []
    for kind in GRAPH_KINDS:
        if kind == "bigram_skipgram" and not cfg.skipgrams:
            continue
        for s in streams:
            skip = kind == "bigram_skipgram"
            export = word_graph(s, skipgrams=skip, min_weight=cfg.export_min_weight)
            export_graph(export, graphs_dir / f"{s.doc_id}.{kind}{suffix}", cfg.export_format)
            giant, summary = _giant_summary(word_graph(s, skipgrams=skip, min_weight=cfg.min_weight), cfg.clique_cap)
            columns.append(f"{kind}:{s.doc_id}")
            summaries.append(summary)
            if giant.number_of_nodes() >= 2:
                eig = gs.eigenvector_centrality(giant)
                ranked = sorted(eig.items(), key=lambda kv: (-kv[1], kv[0]))[: cfg.top_central]
                eig_rows += [(kind, s.doc_id, i, t, v) for i, (t, v) in enumerate(ranked, 1)]

    stats = ("n_vertices", "n_edges") + gs.GraphSummary.STATISTICS
    write_csv(
        tmp / "graph_summary.csv",
        ["statistic"] + columns,
        [[st] + [None if sm is None else getattr(sm, st) for sm in summaries] for st in stats],
    )
    write_json(
        tmp / "graph_summary.json",
        {c: (None if sm is None else sm.as_dict()) for c, sm in zip(columns, summaries)},
    )
    write_csv(tmp / "eigenvector_top.csv", ["graph", "doc_id", "rank", "term", "eigenvector"], eig_rows)


# network -----------------------------------------------------------------


def cmd_network(cfg: RunConfig, tmp: Path):
    g = load_graph(cfg.edges)
    if g.number_of_nodes() == 0:
        raise ValidationError(f"{cfg.edges}: edge list is empty")
    giant = giant_component(g)
    missing = [v for v in cfg.vertices if v not in g]
    if missing:
        raise ValidationError(f"unknown vertex name(s) in extract list: {', '.join(map(repr, missing))}")
    outside = [v for v in cfg.vertices if v not in giant]
    if outside:
        raise ValidationError(f"vertex name(s) outside the giant component: {', '.join(map(repr, outside))}")
    if giant.number_of_nodes() < 2:
        raise GraphSizeError("giant component has fewer than 2 vertices")
    _write_run_config(tmp, cfg)

    summary = gs.summarize(giant, clique_cap=cfg.clique_cap)
    whole = {
        "n_vertices_total": g.number_of_nodes(),
        "n_edges_total": g.number_of_edges(),
        "n_components": gs._components(gs.as_adjacency(g)[0])[0],
    }
    write_json(tmp / "summary.json", {**whole, "giant_component": summary.as_dict()})
    rows = list(whole.items()) + [(k, getattr(summary, k)) for k in ("n_vertices", "n_edges") + gs.GraphSummary.STATISTICS]
    write_csv(tmp / "summary.csv", ["statistic", "value"], rows)

    scores = gs.centrality(giant)
    header = ["vertex"] + list(gs.CentralityScores.MEASURES)
    write_csv(tmp / "centrality.csv", header, scores.rows(top=cfg.top))
    if cfg.vertices:
        write_csv(
            tmp / "selected_vertices.csv",
            ["measure"] + list(cfg.vertices),
            [[m] + [scores[v][m] for v in cfg.vertices] for m in gs.CentralityScores.MEASURES],
        )


# sbm ---------------------------------------------------------------------


def cmd_sbm(cfg: RunConfig, tmp: Path):
    lo, hi = parse_k_range(cfg.k_range)
    fit_seed = derive_seed(cfg.seed, "fit")
    gof_seed = derive_seed(cfg.seed, "gof")
    try:
        y = load_adjacency(cfg.edges)
        fcfg = FitConfig(tol=cfg.tol, max_iter=cfg.max_iter, restarts=cfg.restarts, seed=fit_seed)
        result = select_k(y, (lo, hi), fcfg)
        model = canonicalize(result.model)
        report = gof(y, model, n_sims=cfg.n_sims, seed=gof_seed)
    except ValidationError as e:
        raise ValidationError(f"{cfg.edges}: {e}") from e
    _write_run_config(tmp, cfg, fit=fit_seed, gof=gof_seed)

    K = model.K
    groups = list(range(1, K + 1))
    write_json(
        tmp / "fit.json",
        {
            "K": K,
            "pi": model.pi,
            "theta": model.theta,
            "membership": {str(v): int(g) + 1 for v, g in zip(model.labels, model.membership)},
            "icl": result.icl,
            "complete_loglik": result.complete_loglik,
            "icl_by_k": {str(k): v for k, v in sorted(result.icl_by_k.items())},
            "k_range": [lo, hi],
            "restarts": cfg.restarts,
            "seed": cfg.seed,
            "fit_seed": fit_seed,
            "group_numbering": "1-based, ordered by size descending",
        },
    )
    write_csv(
        tmp / "membership.csv",
        ["vertex", "group"],
        [(v, int(g) + 1) for v, g in zip(model.labels, model.membership)],
    )
    write_csv(tmp / "theta.csv", ["group"] + groups, [[a + 1] + list(model.theta[a]) for a in range(K)])
    n = len(model.membership)
    write_csv(
        tmp / "groups.csv",
        ["measure"] + groups,
        [["size"] + [int(s) for s in model.sizes], ["proportion"] + [float(s) / n for s in model.sizes]],
    )
    write_csv(tmp / "model_selection.csv", ["k", "icl"], sorted(result.icl_by_k.items()))
    write_csv(
        tmp / "gof.csv",
        ["statistic", "observed", "sim_mean", "ci_low", "ci_high", "ppp", "n_excluded"],
        [(r.statistic, r.observed, r.sim_mean, r.ci_low, r.ci_high, r.ppp, r.n_excluded) for r in report.rows],
    )
    write_csv(
        tmp / "gof_samples.csv",
        ["replicate"] + list(GOF_STATISTICS),
        [[i] + [report.samples[s][i] for s in GOF_STATISTICS] for i in range(report.n_sims)],
    )
    write_json(
        tmp / "gof.json",
        {
            "n_sims": report.n_sims,
            "seed": gof_seed,
            "sidedness": report.sidedness,
            "rows": [dataclasses.asdict(r) for r in report.rows],
        },
    )


COMMANDS = {"discourse": cmd_discourse, "network": cmd_network, "sbm": cmd_sbm}


# argument parsing --------------------------------------------------------


def _flag(p, *names, **kw):
    # None means "not given" so config-file values survive
    kw.setdefault("default", None)
    p.add_argument(*names, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"polnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        _flag(p, "--config", help="YAML or JSON file of settings; flags override it")
        _flag(p, "--out", "-o", help="output directory")
        _flag(p, "--export-format", choices=sorted(EXPORT_SUFFIX), help="graph export format (default graphml)")
        _flag(p, "--force", action="store_true", help="replace a non-empty output directory")

    d = sub.add_parser("discourse", help="vocabulary, polarity and word-graph reports for a corpus")
    common(d)
    _flag(d, "--docs", help="directory of UTF-8 .txt documents (file stem = document id)")
    _flag(d, "--stopwords", help="stop-word list, one per line")
    _flag(d, "--lexicon", help="sentiment lexicon CSV with header term,polarity")
    _flag(d, "--no-sentiment", dest="sentiment", action="store_false", help="skip polarity scoring")
    _flag(d, "--merge", action="append", metavar="ID=DOC1,DOC2", help="concatenate documents into one")
    _flag(d, "--unicode-policy", choices=UNICODE_POLICIES)
    _flag(d, "--min-weight", type=int, help="edge weight threshold for statistics (default 1)")
    _flag(d, "--export-min-weight", type=int, help="edge weight threshold for graph exports (default 1)")
    _flag(d, "--no-skipgrams", dest="skipgrams", action="store_false", help="bigram graphs only")
    _flag(d, "--top-n", type=int, help="rows in frequency tables (default 25)")
    _flag(d, "--top-central", type=int, help="rows per graph in eigenvector_top.csv (default 10)")
    _flag(d, "--distinct-polarity", action="store_true", help="count each matched term once")
    _flag(d, "--clique-cap", type=int, help="largest component size for exact clique search")
    _flag(d, "--seed", type=int, help="recorded for provenance; the pipeline is deterministic")

    n = sub.add_parser("network", help="giant-component statistics and centralities of an edge list")
    common(n)
    _flag(n, "--edges", help="edge list CSV (u,v[,weight]) or GraphML")
    _flag(n, "--vertices", nargs="+", help="vertices for the selected-centrality extract")
    _flag(n, "--top", type=int, help="keep the top N rows of centrality.csv by eigenvector")
    _flag(n, "--clique-cap", type=int)
    _flag(n, "--seed", type=int, help="recorded for provenance; the pipeline is deterministic")

    s = sub.add_parser("sbm", help="fit a Bernoulli block model with ICL selection and check its fit")
    common(s)
    _flag(s, "--edges", help="edge list CSV (u,v)")
    _flag(s, "--seed", type=int, help="64-bit seed for restarts and simulations (required)")
    _flag(s, "--k-range", help="candidate group counts, e.g. 1:6 (default)")
    _flag(s, "--restarts", type=int, help="initialisations per K (default 20)")
    _flag(s, "--tol", type=float, help="EM convergence tolerance (default 1e-6)")
    _flag(s, "--max-iter", type=int, help="EM iteration cap (default 500)")
    _flag(s, "--n-sims", type=int, help="GOF replicates (default 1000, minimum 100)")
    return parser


def run(argv=None) -> Path:
    args = build_parser().parse_args(argv)
    cfg = _build_config(args)
    with _atomic_output(cfg.out, cfg.force) as tmp:
        COMMANDS[cfg.command](cfg, tmp)
    return Path(cfg.out)


def main(argv=None) -> int:
    try:
        out = run(argv)
    except (PolnetError, OSError) as e:
        print(f"polnet: error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
