"""Pipeline for observed weighted-network groups of unequal size.

The paired statistics need equally sized groups, so unequal groups are
equalized per repetition, either by oversampling the smaller group up to
the larger size or by subsampling the larger group down.  Each repetition
then draws a fresh random split, computes the requested statistics, and the
batch of statistics is reduced to a five-number summary (NA repetitions are
excluded and counted).  A threshold sweep repeats the whole procedure on
absolute-value binarized copies of the graphs for each threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AllNAError,
    DataLoadError,
    GraphTestError,
    MixedDimensionsError,
    UnequalWithSplitOnlyError,
)
from .graphs import (
    FiveNumberSummary,
    GraphSample,
    five_number_summary,
    load_adjacency_csv,
    threshold_binarize,
)
from .models import TwoBlockModel, sample_population
from .rng import substream
from .twosample import TestResult, random_partition, run_method

STRATEGIES = ("oversample_smaller", "subsample_larger", "split_only")


@dataclass(frozen=True, eq=False)
class GroupDataset:
    """One group of observed networks plus where they came from."""

    label: str
    sample: GraphSample
    source_paths: tuple[Path, ...]


@dataclass(frozen=True)
class ResamplingPlan:
    strategy: str
    repetitions: int
    seed: int

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"strategy must be one of {STRATEGIES}, got {self.strategy!r}"
            )
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be at least 1, got {self.repetitions}")


@dataclass(frozen=True, eq=False)
class RepeatedRun:
    """All repetitions of one method: raw results, summary of the non-NA
    statistics (None if every repetition was NA), and the NA count."""

    method: str
    results: tuple[TestResult, ...]
    summary: FiveNumberSummary | None
    na_count: int

    @property
    def repetitions(self) -> int:
        return len(self.results)

    def statistics(self) -> list[float]:
        return [r.statistic for r in self.results if not r.is_na]


@dataclass(frozen=True, eq=False)
class SweepRow:
    tau: float
    method: str
    summary: FiveNumberSummary | None
    na_count: int
    repetitions: int


def load_group(directory, label: str | None = None, tolerance: float = 1e-9) -> GroupDataset:
    """Load every ``*.csv`` adjacency file in a directory, in name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataLoadError(f"{directory} is not a directory")
    paths = sorted(p for p in directory.iterdir() if p.suffix == ".csv")
    if not paths:
        raise DataLoadError(f"no .csv files in {directory}")

    graphs = []
    for path in paths:
        try:
            graphs.append(load_adjacency_csv(path, tolerance))
        except GraphTestError as err:
            raise DataLoadError(f"{path.name}: {err}") from err
        except (OSError, ValueError) as err:
            raise DataLoadError(f"{path.name}: {err}") from err
        if graphs[-1].n != graphs[0].n:
            raise MixedDimensionsError(
                f"{path.name} has {graphs[-1].n} nodes, expected {graphs[0].n} "
                f"(from {paths[0].name})"
            )
    return GroupDataset(
        label=label or directory.name,
        sample=GraphSample(tuple(graphs)),
        source_paths=tuple(paths),
    )


def equalize(
    sample_a: GraphSample,
    sample_b: GraphSample,
    strategy: str,
    rng: np.random.Generator,
) -> tuple[GraphSample, GraphSample]:
    """Resample one group so both have the same size.

    ``oversample_smaller`` appends draws from the smaller group (without
    replacement while the deficit fits, with replacement otherwise);
    ``subsample_larger`` keeps a without-replacement draw from the larger
    group; ``split_only`` requires already-equal groups.  Output graphs are
    always members of the input groups, never synthesized.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if sample_a.m == sample_b.m:
        return sample_a, sample_b
    if strategy == "split_only":
        raise UnequalWithSplitOnlyError(
            f"groups have {sample_a.m} and {sample_b.m} graphs; "
            "split_only needs equal sizes"
        )

    small, large = (sample_a, sample_b) if sample_a.m < sample_b.m else (sample_b, sample_a)
    if strategy == "oversample_smaller":
        deficit = large.m - small.m
        replace = deficit > small.m
        extra = rng.choice(small.m, size=deficit, replace=replace)
        grown = GraphSample(small.graphs + tuple(small.graphs[i] for i in extra))
        out_small, out_large = grown, large
    else:  # subsample_larger
        keep = rng.choice(large.m, size=small.m, replace=False)
        out_small, out_large = small, GraphSample(tuple(large.graphs[i] for i in keep))

    if sample_a.m < sample_b.m:
        return out_small, out_large
    return out_large, out_small


def _drop_last_pair(a: GraphSample, b: GraphSample) -> tuple[GraphSample, GraphSample]:
    return GraphSample(a.graphs[:-1]), GraphSample(b.graphs[:-1])


def repeated_tests(
    sample_a: GraphSample,
    sample_b: GraphSample,
    plan: ResamplingPlan,
    methods: tuple[str, ...] = ("tn",),
    alpha: float = 0.05,
    drop_last: bool = False,
) -> dict[str, RepeatedRun]:
    """Equalize + split + test, repeated ``plan.repetitions`` times.

    Each repetition derives its stream from ``(plan.seed, repetition)`` and
    uses one shared split for every method, so methods are compared on
    identical resamples.  Raises :class:`AllNAError` only when *every*
    result of every method is NA; a single all-NA method simply gets a None
    summary.
    """
    per_method: dict[str, list[TestResult]] = {method: [] for method in methods}
    for rep in range(plan.repetitions):
        rng = substream(plan.seed, rep)
        eq_a, eq_b = equalize(sample_a, sample_b, plan.strategy, rng)
        if drop_last and eq_a.m % 2 != 0:
            eq_a, eq_b = _drop_last_pair(eq_a, eq_b)
        partition = random_partition(eq_a.m, rng)
        for method in methods:
            per_method[method].append(
                run_method(method, eq_a, eq_b, partition, alpha)
            )

    if all(r.is_na for results in per_method.values() for r in results):
        raise AllNAError(
            f"all {plan.repetitions} repetitions produced undefined statistics"
        )

    runs = {}
    for method, results in per_method.items():
        valid = [r.statistic for r in results if not r.is_na]
        runs[method] = RepeatedRun(
            method=method,
            results=tuple(results),
            summary=five_number_summary(valid) if valid else None,
            na_count=len(results) - len(valid),
        )
    return runs


def threshold_sweep(
    sample_a: GraphSample,
    sample_b: GraphSample,
    taus,
    plan: ResamplingPlan,
    methods: tuple[str, ...] = ("tn", "tfro"),
    alpha: float = 0.05,
    drop_last: bool = False,
) -> list[SweepRow]:
    """Binarize both groups at each threshold and rerun the repeated tests.

    Thresholds where every repetition of every method is NA (for example a
    tau above all absolute weights) yield rows with a None summary rather
    than aborting the sweep.
    """
    rows: list[SweepRow] = []
    for tau in taus:
        bin_a = GraphSample(tuple(threshold_binarize(g, tau) for g in sample_a.graphs))
        bin_b = GraphSample(tuple(threshold_binarize(g, tau) for g in sample_b.graphs))
        try:
            runs = repeated_tests(bin_a, bin_b, plan, methods, alpha, drop_last)
        except AllNAError:
            for method in methods:
                rows.append(SweepRow(tau, method, None, plan.repetitions,
                                     plan.repetitions))
            continue
        for method in methods:
            run = runs[method]
            rows.append(SweepRow(tau, method, run.summary, run.na_count,
                                 run.repetitions))
    return rows


def make_synthetic_groups(
    n: int = 100,
    size_a: int = 54,
    size_b: int = 70,
    epsilon: float = 0.7,
    seed: int = 20240817,
    within: tuple[float, float] = (2.0, 3.0),
    between: tuple[float, float] = (1.0, 3.0),
) -> tuple[GraphSample, GraphSample]:
    """Synthetic stand-in for observed groups of unequal size.

    Group A comes from the unshifted two-block Beta design, group B from
    the epsilon-shifted one; the defaults are deliberately unequal so the
    equalization strategies have work to do.  Fixed seed, so fixtures are
    reproducible.
    """
    model = TwoBlockModel(n=n, family="beta", within=within, between=between,
                          epsilon=epsilon)
    group_a = sample_population(model, False, size_a, substream(seed, 0))
    group_b = sample_population(model, True, size_b, substream(seed, 1))
    return group_a, group_b
