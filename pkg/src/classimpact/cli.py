"""Command line entry point: ``classimpact <command> [--config run.ini] [flags]``.

Exit codes: 0 success, 1 domain error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .arff import check_arff_file
from .corpus import load_corpus, validate
from .dataset import (FeatureMatrix, SampleSpec, audit_anti_leak, build_matrix, export_arff, export_csv, read_csv,
                      split_manifest, time_split)
from .errors import ClassImpactError
from .linker import LinkConfig, link
from .metrics import DISTRIBUTIONS, FAMILIES, ClassTextStore, MetricsConfig, family_of, ingest_external
from .textsim import TECHNIQUES, CorpusStats, preprocess, similarity

log = logging.getLogger("classimpact")


class UsageError(Exception):
    """Bad configuration or arguments (exit code 2)."""


def _csv_list(value):
    return tuple(v.strip() for v in str(value).split(",") if v.strip())


@dataclass
class RunConfig:
    project_key: str = ""
    commits: str | None = None
    issues: str | None = None
    releases: str | None = None
    externals: str | None = None
    class_texts: str | None = None
    out: str = "out"
    class_extensions: tuple[str, ...] = (".java",)
    families: tuple[str, ...] = FAMILIES
    techniques: tuple[str, ...] = ("VSM", "JSD", "GC", "OPC", "BC")
    distributions: tuple[str, ...] = DISTRIBUTIONS
    r2c_techniques: tuple[str, ...] = ("VSM", "JSD")
    history_kinds: str = "all"
    tlcc_granularity: str = "release"
    learner: str = "DecisionTree"
    learner_params: dict = field(default_factory=dict)
    seed: int = 0
    repeats: int = 20
    train_fraction: float = 0.8
    pca_variance: float | None = None
    select_repeats: int = 5
    matrix: str | None = None

    def to_dict(self):
        d = dict(self.__dict__)
        d.pop("out")  # where results go does not change them
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @property
    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def metrics_config(self) -> MetricsConfig:
        cfg = MetricsConfig(families=self.families, r2rs_techniques=self.techniques,
                            distributions=self.distributions, r2c_techniques=self.r2c_techniques,
                            history_kinds=self.history_kinds, tlcc_granularity=self.tlcc_granularity)
        try:
            cfg.validate()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return cfg

    def link_config(self) -> LinkConfig:
        if not self.project_key:
            raise UsageError("project key is not configured (set [project] key or --project-key)")
        return LinkConfig(self.project_key, class_extensions=self.class_extensions)


def _number(value):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    raise UsageError(f"learner parameter {value!r} is not numeric")


def load_config(path) -> RunConfig:
    """Read an INI run configuration; relative paths resolve against the file's directory."""
    cp = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    base = Path(path).resolve().parent
    cfg = RunConfig()

    def get(section, key, default=None):
        return cp.get(section, key, fallback=default) if cp.has_section(section) else default

    for key in ("commits", "issues", "releases", "externals", "class_texts", "matrix", "out"):
        value = get("paths", key)
        if value:
            setattr(cfg, key, str((base / value).resolve()) if not Path(value).is_absolute() else value)
    cfg.project_key = get("project", "key", "")
    if get("project", "class_extensions"):
        cfg.class_extensions = _csv_list(get("project", "class_extensions"))
    for key, attr in (("families", "families"), ("techniques", "techniques"),
                      ("distributions", "distributions"), ("r2c_techniques", "r2c_techniques")):
        if get("metrics", key) is not None:
            setattr(cfg, attr, _csv_list(get("metrics", key)))
    cfg.history_kinds = get("metrics", "history_kinds", cfg.history_kinds)
    cfg.tlcc_granularity = get("metrics", "tlcc_granularity", cfg.tlcc_granularity)
    if cp.has_section("learner"):
        params = dict(cp.items("learner"))
        cfg.learner = params.pop("kind", cfg.learner)
        cfg.learner_params = {k: _number(v) for k, v in params.items()}
    try:
        cfg.seed = int(get("sample", "seed", cfg.seed))
        cfg.repeats = int(get("sample", "repeats", cfg.repeats))
        cfg.train_fraction = float(get("sample", "train_fraction", cfg.train_fraction))
        pca = get("sample", "pca_variance")
        cfg.pca_variance = float(pca) if pca else None
        cfg.select_repeats = int(get("select", "repeats", cfg.select_repeats))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    return cfg


def resolve(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for name in ("commits", "issues", "releases", "externals", "class_texts", "matrix", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "project_key", None):
        cfg.project_key = args.project_key
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "repeats", None) is not None:
        cfg.repeats = args.repeats
    if getattr(args, "families", None):
        cfg.families = _csv_list(args.families)
    if getattr(args, "technique", None):
        cfg.techniques = _csv_list(args.technique)
    if getattr(args, "distribution", None):
        cfg.distributions = _csv_list(args.distribution)
    if getattr(args, "learner", None) and args.learner != cfg.learner:
        cfg.learner, cfg.learner_params = args.learner, {}
    r2rs = getattr(args, "r2rs", None)
    if r2rs is True and "R2RS" not in cfg.families:
        cfg.families = ("R2RS", *cfg.families)
    elif r2rs is False:
        cfg.families = tuple(f for f in cfg.families if f != "R2RS")
    if not cfg.families:
        raise UsageError("at least one metric family must be enabled")
    bad = set(cfg.families) - set(FAMILIES)
    if bad:
        raise UsageError(f"unknown metric families {sorted(bad)}; choose from {', '.join(FAMILIES)}")
    return cfg


# ---------------------------------------------------------------- artifacts

def _write_json(path: Path, payload: dict, cfg: RunConfig):
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"config_hash": cfg.hash, **payload}
    path.write_text(json.dumps(body, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    _record(path, cfg)
    return path


def _record(path: Path, cfg: RunConfig):
    """Sidecar manifest: config hash and content digest of every artifact in the output dir."""
    manifest = path.parent / "manifest.json"
    entries = json.loads(manifest.read_text(encoding="utf-8")) if manifest.exists() else {}
    entries[path.name] = {"config_hash": cfg.hash, "sha256": hashlib.sha256(path.read_bytes()).hexdigest()}
    manifest.write_text(json.dumps(dict(sorted(entries.items())), indent=2) + "\n", encoding="utf-8")


def _need(cfg, *names):
    for n in names:
        value = getattr(cfg, n)
        if not value:
            raise UsageError(f"no {n} input configured")
        if not Path(value).exists():
            raise FileNotFoundError(f"{n} input not found: {value}")


def _corpus(cfg):
    _need(cfg, "commits", "issues")
    if cfg.releases and not Path(cfg.releases).exists():
        raise FileNotFoundError(f"releases input not found: {cfg.releases}")
    return load_corpus(cfg.link_config().project_key, cfg.commits, cfg.issues, cfg.releases)


def _matrix(cfg) -> FeatureMatrix:
    if cfg.matrix:
        _need(cfg, "matrix")
        m = read_csv(cfg.matrix)
        return m.select([f for f in m.feature_names if family_of(f) in cfg.families])
    corpus = _corpus(cfg)
    lc = cfg.link_config()
    externals = None
    if cfg.externals:
        _need(cfg, "externals")
        externals = ingest_external(cfg.externals)
    texts = None
    if cfg.class_texts:
        _need(cfg, "class_texts")
        texts = ClassTextStore.from_jsonl(cfg.class_texts, corpus)
    return build_matrix(corpus, link(corpus, lc), lc, cfg.metrics_config(), externals, texts)


def _learner(cfg):
    from .learn import LearnerSpec

    try:
        return LearnerSpec(cfg.learner, dict(cfg.learner_params), seed=cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- commands

def cmd_ingest(cfg, args):
    corpus = _corpus(cfg)
    report = validate(corpus, cfg.class_extensions).to_dict()
    report["releases"] = len(corpus.releases) if corpus.releases is not None else None
    path = _write_json(Path(cfg.out) / "corpus-summary.json", report, cfg)
    print(f"{report['commits']} commits, {sum(report['requirements'].values())} requirements, "
          f"{report['distinct_class_files']} class files -> {path}")
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)


def cmd_link(cfg, args):
    corpus = _corpus(cfg)
    res = link(corpus, cfg.link_config())
    path = _write_json(Path(cfg.out) / "link-report.json", res.report(), cfg)
    print(f"{len(res.changes)} linked, {len(res.unlinked)} unlinked -> {path}")


def cmd_matrix(cfg, args):
    m = _matrix(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    export_csv(m, out / "matrix.csv")
    _record(out / "matrix.csv", cfg)
    export_arff(m, out / "matrix.arff", relation=f"impact-{cfg.hash}")
    _record(out / "matrix.arff", cfg)
    arff_errors = check_arff_file(out / "matrix.arff")
    report = dict(m.report)
    report["features"] = list(m.feature_names)
    report["anti_leak_violations"] = len(audit_anti_leak(m))
    report["arff_valid"] = not arff_errors
    try:
        report["split"] = split_manifest(*time_split(m, cfg.train_fraction))
    except ClassImpactError as exc:
        report["split"] = {"error": str(exc)}
    _write_json(out / "matrix-report.json", report, cfg)
    print(f"{len(m)} rows x {len(m.feature_names)} features ({m.positives} impacted) -> {out / 'matrix.csv'}")


def _report_name(args):
    r2rs = getattr(args, "r2rs", None)
    return {True: "eval-report-with-r2rs.json", False: "eval-report-without-r2rs.json"}.get(r2rs, "eval-report.json")


def cmd_eval(cfg, args):
    from .learn import run_protocol

    m = _matrix(cfg)
    spec = _learner(cfg)
    rep = run_protocol(spec, m, SampleSpec(cfg.seed, cfg.repeats), cfg.train_fraction, cfg.pca_variance)
    path = _write_json(Path(cfg.out) / _report_name(args), rep.to_dict(), cfg)
    mean, sd = rep.mean, rep.stddev
    print(f"{spec.kind}: F1 {mean['f1']:.3f} ± {sd['f1']:.3f}, precision {mean['precision']:.3f}, "
          f"recall {mean['recall']:.3f} over {len(rep.per_sample)} samples -> {path}")


def cmd_igr(cfg, args):
    from .learn import igr_rank

    m = _matrix(cfg)
    ranking = igr_rank(m, bins=args.bins)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "igr-rank.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature,igr,rank\n")
        for f, v, r in ranking:
            fh.write(f"{f},{v!r},{r}\n")
    _record(path, cfg)
    for f, v, r in ranking[:10]:
        print(f"{r:3d}  {f:<20s} {v:.4f}")


def cmd_select(cfg, args):
    from .learn import wrapper_select

    m = _matrix(cfg)
    spec = _learner(cfg)
    res = wrapper_select(spec, m, repeats=cfg.select_repeats, final_repeats=cfg.repeats, seed=cfg.seed,
                        train_fraction=cfg.train_fraction)
    path = _write_json(Path(cfg.out) / "selection.json", res.to_dict(spec.kind), cfg)
    print(f"selected {list(res.subset)} (F1 {res.to_dict()['score']:.3f}, {res.expansions} expansions) -> {path}")


def cmd_stats(cfg, args):
    from .stats import compare_reports, fisher_result

    if args.fisher:
        cells = [int(v) for v in args.fisher.split(",")]
        if len(cells) != 4:
            raise UsageError("--fisher takes four comma-separated counts a,b,c,d")
        payload = fisher_result(*cells).to_dict()
        payload["table"] = [cells[:2], cells[2:]]
    else:
        if len(args.reports) != 2:
            raise UsageError("stats needs two eval reports (or --fisher a,b,c,d)")
        a, b = (json.loads(Path(p).read_text(encoding="utf-8")) for p in args.reports)
        payload = compare_reports(a, b, args.metric, labels=tuple(Path(p).stem for p in args.reports))
    path = _write_json(Path(cfg.out) / "stats-report.json", payload, cfg)
    verdict = "significant" if payload["significant"] else "not significant"
    print(f"{payload['test']}: statistic {payload['statistic']:.4g}, p = {payload['p']:.4g} ({verdict} at "
          f"alpha {payload['alpha']}) -> {path}")


def cmd_report(cfg, args):
    out = Path(cfg.out)
    if not out.is_dir():
        raise FileNotFoundError(f"output directory not found: {out}")
    lines = [f"# Results in {out}", ""]
    summary = {}
    for p in sorted(out.glob("*.json")):
        if p.name == "manifest.json":
            continue
        data = json.loads(p.read_text(encoding="utf-8"))
        if "per_sample" in data:
            mean, sd = data["mean"], data["stddev"]
            summary[p.name] = {"learner": data["learner"], "f1": mean["f1"], "f1_sd": sd["f1"],
                               "precision": mean["precision"], "recall": mean["recall"]}
            lines.append(f"- {p.name}: {data['learner']} F1 {mean['f1']:.3f} ± {sd['f1']:.3f} "
                         f"(P {mean['precision']:.3f}, R {mean['recall']:.3f}, {len(data['per_sample'])} samples)")
        elif "subset" in data:
            summary[p.name] = {"subset": data["subset"], "score": data["score"]}
            lines.append(f"- {p.name}: subset {data['subset']} scoring {data['score']:.3f}")
        elif "test" in data:
            summary[p.name] = {"test": data["test"], "p": data["p"]}
            lines.append(f"- {p.name}: {data['test']} p = {data['p']:.4g}")
        elif "linked" in data:
            summary[p.name] = {"linked": data["linked"], "unlinked": data["unlinked"]}
            lines.append(f"- {p.name}: {data['linked']} linked, {data['unlinked']} unlinked")
    if (out / "igr-rank.csv").exists():
        top = (out / "igr-rank.csv").read_text(encoding="utf-8").splitlines()[1:6]
        lines.append("- top IGR: " + ", ".join(row.split(",")[0] for row in top))
    text = "\n".join(lines) + "\n"
    (out / "report.md").write_text(text, encoding="utf-8")
    _write_json(out / "report.json", {"artifacts": summary}, cfg)
    print(text, end="")


def cmd_similarity(cfg, args):
    a = preprocess(args.text_a, split=True)
    b = preprocess(args.text_b, split=True)
    stats = CorpusStats.from_documents([a, b])
    techniques = [args.technique] if args.technique else list(TECHNIQUES)
    for t in techniques:
        print(f"{t}\t{similarity(t, a, b, stats):.6f}")


def cmd_synth(cfg, args):
    from .synth import SynthSpec, generate

    spec = SynthSpec(requirements=args.requirements, seed=cfg.seed)
    paths = generate(spec).write(cfg.out)
    ini = Path(cfg.out) / "run.ini"
    ini.write_text(
        "[paths]\ncommits = commits.jsonl\nissues = issues.jsonl\nreleases = releases.txt\n"
        "externals = externals.csv\nout = results\n\n"
        f"[project]\nkey = {spec.project_key}\n\n"
        "[metrics]\nfamilies = R2RS,TLCC,SQ,CKJM\n\n"
        "[learner]\nkind = DecisionTree\n\n"
        "[sample]\nseed = 0\nrepeats = 20\n", encoding="utf-8")
    print(f"synthetic corpus written to {cfg.out} ({', '.join(sorted(paths))}); config: {ini}")


COMMANDS = {
    "ingest": (cmd_ingest, "parse and validate the inputs"),
    "link": (cmd_link, "link requirements to commits"),
    "matrix": (cmd_matrix, "build the labelled feature matrix (CSV + ARFF)"),
    "eval": (cmd_eval, "run the split/undersample/train/evaluate protocol"),
    "igr": (cmd_igr, "rank features by information gain ratio"),
    "select": (cmd_select, "best-first wrapper feature selection"),
    "stats": (cmd_stats, "Kruskal-Wallis on two eval reports, or Fisher's exact test"),
    "report": (cmd_report, "summarise the artifacts of an output directory"),
    "similarity": (cmd_similarity, "score two texts with every similarity technique"),
    "synth": (cmd_synth, "write a synthetic corpus with a planted signal"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--project-key")
    inputs.add_argument("--commits")
    inputs.add_argument("--issues")
    inputs.add_argument("--releases")

    features = argparse.ArgumentParser(add_help=False)
    features.add_argument("--externals")
    features.add_argument("--class-texts")
    features.add_argument("--matrix", help="reuse a matrix.csv instead of rebuilding it")
    features.add_argument("--families", help="comma list of " + ",".join(FAMILIES))
    features.add_argument("--technique", help="comma list of R2RS techniques")
    features.add_argument("--distribution", help="comma list of Max,Av,Top5")
    g = features.add_mutually_exclusive_group()
    g.add_argument("--with-r2rs", dest="r2rs", action="store_true", default=None)
    g.add_argument("--without-r2rs", dest="r2rs", action="store_false")

    learning = argparse.ArgumentParser(add_help=False)
    learning.add_argument("--learner")
    learning.add_argument("--repeats", type=int)

    parser = argparse.ArgumentParser(prog="classimpact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parents = {
        "ingest": [common, inputs], "link": [common, inputs],
        "matrix": [common, inputs, features], "eval": [common, inputs, features, learning],
        "igr": [common, inputs, features], "select": [common, inputs, features, learning],
        "stats": [common], "report": [common], "similarity": [common], "synth": [common],
    }
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=parents[name], help=help_, description=help_)
        if name == "igr":
            p.add_argument("--bins", type=int, default=10)
        elif name == "stats":
            p.add_argument("reports", nargs="*", help="two eval-report.json files")
            p.add_argument("--metric", default="f1", choices=("f1", "precision", "recall"))
            p.add_argument("--fisher", help="a,b,c,d counts of a 2x2 table")
        elif name == "similarity":
            p.add_argument("text_a")
            p.add_argument("text_b")
            p.add_argument("--technique", choices=TECHNIQUES)
        elif name == "synth":
            p.add_argument("--requirements", type=int, default=80)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    func = COMMANDS[args.command][0]
    try:
        cfg = resolve(args)
        func(cfg, args)
    except ClassImpactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
