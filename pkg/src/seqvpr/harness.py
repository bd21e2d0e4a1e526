"""Experiment harness: run (technique x dataset x K) sweeps and emit reports.

Configuration is a single JSON document; CLI flags override individual
fields. Wall-clock measurements are quarantined in ``timings.csv`` so the
primary outputs (``summary.json``, ``summary.csv``, PR CSVs, SVG plots)
are byte-identical across re-runs on fixed inputs.

PCU needs an encoding time that does not wobble with the local machine,
so it is computed only from *declared* times: the manifest value for
imported descriptor sets, or the ``encode_time_per_frame_sec`` field of a
hog technique entry. Cells without a declared positive time report PCU
as n/a. Within one (dataset, K) group both t_e and t_e_max are scaled by
the same cost model, so the model choice is recorded per report.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import (
    DEFAULT_GT_TOLERANCE,
    GroundTruth,
    aligned_ground_truth,
    load_ground_truth,
    load_image_set,
)
from .descriptor import DescriptorSet, HogParams, encode_set, import_descriptors
from .matcher import SimilarityMatrix, build_similarity_matrix, match_sequences
from .metrics import (
    COST_MODELS,
    MetricsReport,
    PcuInputs,
    boost_pct,
    label_matches,
    p_at_r100,
    pcu,
    pr_curve,
    sequence_cost_model,
)
from .svgplot import Series, line_chart

PAPER_K_VALUES = [1, 2, 5, 10, 15]
FULL_K_VALUES = list(range(1, 16))

SUMMARY_CSV_COLUMNS = ["dataset", "technique", "k", "auc", "p_r100", "pcu",
                       "boost_pct", "cost_model"]


@dataclass(frozen=True)
class ImportSource:
    query: Path
    ref: Path
    manifest: Path


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    query_dir: Path | None = None
    ref_dir: Path | None = None
    gt_csv: Path | None = None
    gt_tolerance: int | None = None  # aligned tolerance; None = config default


@dataclass(frozen=True)
class TechniqueSpec:
    name: str
    kind: str  # "hog" | "import"
    hog_params: HogParams = HogParams()
    encode_time_per_frame_sec: float | None = None  # declared time for hog
    sources: dict = field(default_factory=dict)  # dataset name (or "*") -> ImportSource

    def source_for(self, dataset_name: str) -> ImportSource | None:
        return self.sources.get(dataset_name) or self.sources.get("*")


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: list[DatasetSpec]
    techniques: list[TechniqueSpec]
    k_values: list[int]
    cost_model: str = "naive"
    output_dir: Path = Path("out")
    seed: int = 0
    workers: int = 4
    gt_tolerance: int = DEFAULT_GT_TOLERANCE


@dataclass(frozen=True)
class SkippedCell:
    dataset: str
    technique: str
    k: int | None
    reason: str


@dataclass(frozen=True)
class TimingRecord:
    dataset: str
    technique: str
    stage: str
    k: int | None
    seconds: float


@dataclass
class ExperimentResult:
    reports: list[MetricsReport]
    skipped: list[SkippedCell]
    timings: list[TimingRecord]
    cost_model: str
    seed: int


def normalize_k_values(values) -> list[int]:
    """Sort ascending, deduplicate, and force the k=1 baseline in."""
    ks = sorted({int(k) for k in values} | {1})
    if ks[0] < 1:
        raise ValueError("k values must be >= 1")
    return ks


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_config(config_path: str | Path, *, k_values=None, cost_model: str | None = None,
                output_dir: str | Path | None = None, seed: int | None = None,
                gt_tolerance: int | None = None) -> ExperimentConfig:
    """Parse a JSON config; keyword arguments override config fields.

    Relative paths inside the file are resolved against its directory.
    """
    config_path = Path(config_path)
    raw = json.loads(config_path.read_text(encoding="utf-8"))
    base = config_path.parent

    datasets = []
    for entry in raw.get("datasets", []):
        gt = entry.get("gt")
        gt_csv = None
        ds_tolerance = None
        if isinstance(gt, str):
            gt_csv = _resolve(base, gt)
        elif isinstance(gt, dict):
            ds_tolerance = int(gt.get("aligned_tolerance", gt.get("aligned", 0)))
        elif gt is not None:
            raise ValueError(f"dataset {entry.get('name')}: gt must be a path or aligned spec")
        datasets.append(DatasetSpec(
            name=str(entry["name"]),
            query_dir=_resolve(base, entry["query_dir"]) if "query_dir" in entry else None,
            ref_dir=_resolve(base, entry["ref_dir"]) if "ref_dir" in entry else None,
            gt_csv=gt_csv,
            gt_tolerance=ds_tolerance,
        ))
    if not datasets:
        raise ValueError("config declares no datasets")

    techniques = []
    for entry in raw.get("techniques", []):
        kind = str(entry.get("kind", "hog"))
        if kind == "hog":
            hog_raw = dict(entry.get("hog", {}))
            if "resize_to" in hog_raw:
                hog_raw["resize_to"] = tuple(hog_raw["resize_to"])
            declared = entry.get("encode_time_per_frame_sec")
            techniques.append(TechniqueSpec(
                name=str(entry["name"]), kind="hog",
                hog_params=HogParams(**hog_raw),
                encode_time_per_frame_sec=float(declared) if declared is not None else None,
            ))
        elif kind == "import":
            sources = {}
            if "data" in entry:
                for ds_name, files in entry["data"].items():
                    sources[ds_name] = ImportSource(
                        query=_resolve(base, files["query"]),
                        ref=_resolve(base, files["ref"]),
                        manifest=_resolve(base, files["manifest"]),
                    )
            elif {"query", "ref", "manifest"} <= entry.keys():
                sources["*"] = ImportSource(
                    query=_resolve(base, entry["query"]),
                    ref=_resolve(base, entry["ref"]),
                    manifest=_resolve(base, entry["manifest"]),
                )
            else:
                raise ValueError(f"import technique {entry.get('name')}: no descriptor files")
            techniques.append(TechniqueSpec(name=str(entry["name"]), kind="import",
                                            sources=sources))
        else:
            raise ValueError(f"unknown technique kind: {kind!r}")
    if not techniques:
        raise ValueError("config declares no techniques")

    model = cost_model if cost_model is not None else raw.get("cost_model", "naive")
    if model not in COST_MODELS:
        raise ValueError(f"unknown cost model: {model!r}")
    # Config-file paths resolve against the config dir; CLI overrides
    # resolve against the working directory.
    if output_dir is not None:
        out = Path(output_dir)
    else:
        out = _resolve(base, str(raw.get("output_dir", "out")))
    return ExperimentConfig(
        datasets=datasets,
        techniques=techniques,
        k_values=normalize_k_values(k_values if k_values is not None
                                    else raw.get("k_values", PAPER_K_VALUES)),
        cost_model=model,
        output_dir=out,
        seed=int(seed if seed is not None else raw.get("seed", 0)),
        workers=int(raw.get("workers", 4)),
        gt_tolerance=int(gt_tolerance if gt_tolerance is not None
                         else raw.get("gt_tolerance", DEFAULT_GT_TOLERANCE)),
    )


def validate_paths(config: ExperimentConfig) -> None:
    """Fail fast on any missing input path, before any compute."""
    missing = []
    for ds in config.datasets:
        for p in (ds.query_dir, ds.ref_dir):
            if p is not None and not p.is_dir():
                missing.append(str(p))
        if ds.gt_csv is not None and not ds.gt_csv.is_file():
            missing.append(str(ds.gt_csv))
    for tech in config.techniques:
        for src in tech.sources.values():
            for p in (src.query, src.ref, src.manifest):
                if not p.is_file():
                    missing.append(str(p))
    if missing:
        raise FileNotFoundError("missing input paths: " + ", ".join(sorted(set(missing))))


@dataclass
class _PairData:
    """Descriptor sets, similarity matrix and declared time for one cell group."""

    sim: SimilarityMatrix
    declared_t_e: float | None
    timings: list[TimingRecord]


@dataclass
class _RawCell:
    dataset: str
    technique: str
    k: int
    auc: float
    p_r100: float
    curve: object
    match_seconds: float


def _prepare_pair(ds: DatasetSpec, tech: TechniqueSpec,
                  image_cache: dict) -> _PairData:
    timings: list[TimingRecord] = []
    if tech.kind == "hog":
        sets = []
        for stage, directory in (("encode_query", ds.query_dir), ("encode_ref", ds.ref_dir)):
            if ds.name not in image_cache:
                image_cache[ds.name] = {}
            cache = image_cache[ds.name]
            if directory not in cache:
                cache[directory] = load_image_set(directory)
            dset = encode_set(cache[directory], tech.hog_params, technique_name=tech.name)
            timings.append(TimingRecord(ds.name, tech.name, stage, None,
                                        dset.encode_time_per_frame))
            sets.append(dset)
        queries, refs = sets
        declared = tech.encode_time_per_frame_sec
    else:
        src = tech.source_for(ds.name)
        queries = import_descriptors(src.query, src.manifest)
        refs = import_descriptors(src.ref, src.manifest)
        declared = queries.encode_time_per_frame
    sim = build_similarity_matrix(queries, refs)
    return _PairData(sim=sim, declared_t_e=declared, timings=timings)


def _ground_truth_for(ds: DatasetSpec, q: int, r: int, default_tolerance: int) -> GroundTruth:
    if ds.gt_csv is not None:
        return load_ground_truth(ds.gt_csv, num_queries=q, num_refs=r)
    tolerance = ds.gt_tolerance if ds.gt_tolerance is not None else default_tolerance
    return aligned_ground_truth(q, r, tolerance)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (technique, dataset, K) cell and assemble metric reports.

    Descriptors and the similarity matrix are computed once per
    (technique, dataset) and reused across K. Cells whose K exceeds the
    dataset are recorded as skipped without aborting siblings; reports
    are ordered by (dataset, technique, K) regardless of completion
    order.
    """
    validate_paths(config)
    skipped: list[SkippedCell] = []
    timings: list[TimingRecord] = []

    # Plan (dataset, technique) groups; unrunnable pairs are skipped whole.
    plan: list[tuple[DatasetSpec, TechniqueSpec]] = []
    for ds in config.datasets:
        for tech in config.techniques:
            if tech.kind == "hog" and (ds.query_dir is None or ds.ref_dir is None):
                skipped.append(SkippedCell(ds.name, tech.name, None,
                                           "dataset has no image directories"))
                continue
            if tech.kind == "import" and tech.source_for(ds.name) is None:
                skipped.append(SkippedCell(ds.name, tech.name, None,
                                           "no descriptor files for dataset"))
                continue
            plan.append((ds, tech))

    image_cache: dict = {}
    pairs: dict[tuple[str, str], _PairData] = {}
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = {(ds.name, tech.name): pool.submit(_prepare_pair, ds, tech, image_cache)
                   for ds, tech in plan}
        for key, fut in futures.items():
            pairs[key] = fut.result()
    for key in sorted(pairs):
        timings.extend(pairs[key].timings)

    # Per-dataset frame counts must agree across techniques.
    shapes: dict[str, tuple[int, int]] = {}
    for ds, tech in plan:
        sim = pairs[(ds.name, tech.name)].sim
        shape = (sim.num_queries, sim.num_refs)
        if shapes.setdefault(ds.name, shape) != shape:
            raise ValueError(
                f"dataset {ds.name}: technique {tech.name} yields {shape} "
                f"frames but {shapes[ds.name]} expected"
            )

    gts: dict[str, GroundTruth] = {}
    for ds, _ in plan:
        if ds.name not in gts:
            q, r = shapes[ds.name]
            gts[ds.name] = _ground_truth_for(ds, q, r, config.gt_tolerance)

    def run_cell(ds: DatasetSpec, tech: TechniqueSpec, k: int) -> _RawCell:
        pair = pairs[(ds.name, tech.name)]
        start = time.perf_counter()
        matches = match_sequences(pair.sim, k)
        elapsed = time.perf_counter() - start
        labels = label_matches(matches, gts[ds.name])
        curve = pr_curve(labels)
        return _RawCell(dataset=ds.name, technique=tech.name, k=k, auc=curve.auc,
                        p_r100=p_at_r100(labels), curve=curve, match_seconds=elapsed)

    cells: dict[tuple[str, str, int], _RawCell] = {}
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = {}
        for ds, tech in plan:
            q, r = shapes[ds.name]
            for k in config.k_values:
                if k > min(q, r):
                    skipped.append(SkippedCell(
                        ds.name, tech.name, k,
                        f"k={k} exceeds dataset size min(Q={q}, R={r})"))
                    continue
                futures[(ds.name, tech.name, k)] = pool.submit(run_cell, ds, tech, k)
        for key, fut in futures.items():
            cells[key] = fut.result()

    for key in sorted(cells):
        raw = cells[key]
        timings.append(TimingRecord(raw.dataset, raw.technique, "match", raw.k,
                                    raw.match_seconds))

    # PCU pools: per (dataset, k) over techniques with declared positive times.
    declared: dict[tuple[str, str], float | None] = {
        (ds.name, tech.name): pairs[(ds.name, tech.name)].declared_t_e
        for ds, tech in plan
    }
    pcu_values: dict[tuple[str, str, int], float | None] = {}
    for ds_name, k in sorted({(d, k) for d, _, k in cells}):
        group = [key for key in cells if key[0] == ds_name and key[2] == k]
        scaled = {}
        for key in group:
            t_e = declared[(key[0], key[1])]
            if t_e is not None and t_e > 0:
                scaled[key] = sequence_cost_model(t_e, k, config.cost_model)
        t_e_max = max(scaled.values()) if scaled else None
        for key in group:
            if key in scaled:
                pcu_values[key] = pcu(PcuInputs(p_r100=cells[key].p_r100,
                                                t_e=scaled[key], t_e_max=t_e_max))
            else:
                pcu_values[key] = None

    reports = []
    for key in sorted(cells, key=lambda c: (c[0], c[1], c[2])):
        raw = cells[key]
        if raw.k == 1:
            boost = 0.0
        else:
            baseline = cells.get((raw.dataset, raw.technique, 1))
            boost = (boost_pct(raw.auc, baseline.auc)
                     if baseline is not None and baseline.auc > 0 else None)
        reports.append(MetricsReport(
            technique_name=raw.technique,
            dataset_name=raw.dataset,
            k=raw.k,
            pr_curve=raw.curve,
            auc=raw.auc,
            p_r100=raw.p_r100,
            pcu=pcu_values[key],
            encode_time_model=config.cost_model,
            boost_pct_vs_k1=boost,
        ))
    return ExperimentResult(reports=reports, skipped=skipped, timings=timings,
                            cost_model=config.cost_model, seed=config.seed)


def _fmt_value(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr even for numpy scalars
    return str(value)


def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def emit_reports(result: ExperimentResult | list[MetricsReport],
                 output_dir: str | Path) -> list[Path]:
    """Write summary.json/summary.csv, timings.csv, PR CSVs and SVG plots.

    Returns the list of written paths. Accepts either a full
    ExperimentResult or a bare report list.
    """
    if isinstance(result, list):
        result = ExperimentResult(reports=result, skipped=[], timings=[],
                                  cost_model=result[0].encode_time_model if result else "naive",
                                  seed=0)
    if not result.reports:
        raise ValueError("no reports to emit")
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    reports = sorted(result.reports,
                     key=lambda r: (r.dataset_name, r.technique_name, r.k))

    summary = {
        "cost_model": result.cost_model,
        "seed": result.seed,
        "reports": [r.to_dict() for r in reports],
        "skipped": [{"dataset": s.dataset, "technique": s.technique, "k": s.k,
                     "reason": s.reason} for s in result.skipped],
    }
    path = output_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)

    lines = [",".join(SUMMARY_CSV_COLUMNS)]
    for r in reports:
        lines.append(",".join([
            r.dataset_name, r.technique_name, str(r.k), _fmt_value(r.auc),
            _fmt_value(r.p_r100), _fmt_value(r.pcu), _fmt_value(r.boost_pct_vs_k1),
            r.encode_time_model,
        ]))
    path = output_dir / "summary.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(path)

    lines = ["dataset,technique,stage,k,seconds"]
    for t in result.timings:
        k = "" if t.k is None else str(t.k)
        lines.append(f"{t.dataset},{t.technique},{t.stage},{k},{t.seconds!r}")
    path = output_dir / "timings.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(path)

    curve_dir = output_dir / "pr_curves"
    curve_dir.mkdir(exist_ok=True)
    for r in reports:
        rows = ["threshold,precision,recall"]
        rows += [",".join(repr(float(v)) for v in point) for point in r.pr_curve.points]
        path = curve_dir / (f"{_safe_name(r.dataset_name)}__{_safe_name(r.technique_name)}"
                            f"__k{r.k}.csv")
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        written.append(path)

    written.extend(_emit_plots(reports, output_dir))
    return written


def _emit_plots(reports: list[MetricsReport], output_dir: Path) -> list[Path]:
    written = []
    datasets = sorted({r.dataset_name for r in reports})
    for ds in datasets:
        ds_reports = [r for r in reports if r.dataset_name == ds]
        techniques = sorted({r.technique_name for r in ds_reports})
        by_tech = {t: sorted((r for r in ds_reports if r.technique_name == t),
                             key=lambda r: r.k) for t in techniques}

        boost_series = [
            Series(label=t, points=[(r.k, r.boost_pct_vs_k1) for r in rs
                                    if r.k > 1 and r.boost_pct_vs_k1 is not None])
            for t, rs in by_tech.items()
        ]
        boost_series = [s for s in boost_series if s.points]
        if boost_series:
            path = output_dir / f"{_safe_name(ds)}_boost.svg"
            path.write_text(line_chart(
                boost_series, title=f"{ds}: sequence matching boost vs K",
                x_label="sequence length K", y_label="AUC boost vs K=1 (%)",
            ), encoding="utf-8")
            written.append(path)

        auc_series = []
        for t, rs in by_tech.items():
            base = next((r.auc for r in rs if r.k == 1), None)
            if base is None:
                continue
            auc_series.append(Series(label=t, points=[(base, r.auc) for r in rs],
                                     draw_line=False))
        if auc_series:
            path = output_dir / f"{_safe_name(ds)}_auc.svg"
            path.write_text(line_chart(
                auc_series, title=f"{ds}: single-frame vs sequence AUC",
                x_label="single-frame AUC (K=1)", y_label="sequence AUC",
                diagonal=True,
            ), encoding="utf-8")
            written.append(path)

        pcu_series = [
            Series(label=t, points=[(r.k, r.pcu) for r in rs if r.pcu is not None])
            for t, rs in by_tech.items()
        ]
        pcu_series = [s for s in pcu_series if s.points]
        if pcu_series:
            path = output_dir / f"{_safe_name(ds)}_pcu.svg"
            path.write_text(line_chart(
                pcu_series, title=f"{ds}: performance per compute unit vs K",
                x_label="sequence length K", y_label="PCU",
            ), encoding="utf-8")
            written.append(path)
    return written
