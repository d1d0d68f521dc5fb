"""The two reproduction experiments: the positive benchmark table and the
random-pair comparison of the order-2 De Bruijn graphs."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .debruijn import de_bruijn
from .errors import InconclusiveError, InvalidInputError, NoCertificateError
from .jsr import rho_lower
from .shift import AB, make_full_shift
from .solver.bisect import DEFAULT_TOL, BisectionReport, rho_upper
from .system import SwitchedSystem, positive_golden_mean_system

log = logging.getLogger(__name__)

TABLE1_GRAPHS = ((1, 0), (1, 1), (2, 0), (2, 1), (2, 2))
TIE_TOL = 1e-3


@dataclass
class Table1Row:
    label: str
    graph_id: str
    rho_upper: float
    report: BisectionReport


def graph_label(K: int, k: int) -> str:
    return f"G_{{{K},{k}}}"


def run_table1(tolerance: float = DEFAULT_TOL, template: str = "copositive-linear") -> list:
    """Upper bounds for the nonnegative golden-mean benchmark on the five
    De Bruijn graphs of order at most 2 (plus order 1)."""
    system = positive_golden_mean_system()
    lo = rho_lower(system, 8)
    rows = []
    for K, k in TABLE1_GRAPHS:
        db = de_bruijn(system.shift, K, k)
        rep = rho_upper(system, db, template, tol=tolerance, lower=lo)
        rows.append(Table1Row(graph_label(K, k), db.graph_id, rep.rho_upper, rep))
    return rows


# --- Venn experiment -------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 1
    sample_count: int = 1000
    dimension: int = 2
    entry_range: tuple = (-10.0, 10.0)
    template: str = "diagonal-quadratic"
    graphs: tuple = ((2, 0), (2, 1), (2, 2))
    tolerance: float = DEFAULT_TOL
    tie_tolerance: float = TIE_TOL
    lower_len: int = 8

    def __post_init__(self):
        if self.sample_count < 1:
            raise InvalidInputError("sample_count must be >= 1")
        lo, hi = self.entry_range
        if not lo < hi:
            raise InvalidInputError("entry_range must be a nonempty interval")
        if len(self.graphs) != 3:
            raise InvalidInputError("the comparison uses exactly three graphs")


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Philox stream keyed by ``(seed, index)``; one independent stream per sample."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_system(config: ExperimentConfig, index: int) -> SwitchedSystem:
    rng = sample_rng(config.seed, index)
    lo, hi = config.entry_range
    n = config.dimension
    mats = {s: rng.uniform(lo, hi, (n, n)) for s in AB}
    return SwitchedSystem(make_full_shift(AB), mats)


def _short(K, k) -> str:
    return f"G{K}{k}"


def region_names(graphs) -> list:
    """Seven region labels, singles first, then pairs, then the triple."""
    names = [_short(*g) for g in graphs]
    out = [f"{a} only" for a in names]
    out += [f"{names[i]}+{names[j]}" for i, j in ((0, 1), (0, 2), (1, 2))]
    out.append("all")
    return out


def classify(bounds, tie_tolerance: float, graphs) -> str:
    """Region of the graphs whose bound is within ``tie_tolerance`` of the best."""
    best = min(bounds)
    mask = [b - best <= tie_tolerance for b in bounds]
    names = [_short(*g) for g in graphs]
    chosen = [nm for nm, m in zip(names, mask) if m]
    if len(chosen) == 3:
        return "all"
    if len(chosen) == 1:
        return f"{chosen[0]} only"
    return "+".join(chosen)


@dataclass
class VennSample:
    index: int
    rho_lower: float
    bounds: tuple
    region: str
    certificates: tuple = ()  # bisection witnesses, None where no certificate was found


@dataclass
class VennReport:
    config: ExperimentConfig
    counts: dict
    samples: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def fraction(self, region: str) -> float:
        return self.counts[region] / self.total


INCONCLUSIVE = "inconclusive"


def run_sample(config: ExperimentConfig, index: int) -> VennSample:
    system = sample_system(config, index)
    lo = rho_lower(system, config.lower_len)
    bounds, certs = [], []
    inconclusive = False
    for K, k in config.graphs:
        db = de_bruijn(system.shift, K, k)
        try:
            rep = rho_upper(system, db, config.template, tol=config.tolerance, lower=lo)
        except NoCertificateError:
            bounds.append(float("nan"))
            certs.append(None)
            inconclusive = True
            continue
        inconclusive |= rep.inconclusive > 0
        bounds.append(rep.rho_upper)
        certs.append(rep.certificate)
    region = INCONCLUSIVE if inconclusive else classify(bounds, config.tie_tolerance, config.graphs)
    return VennSample(index, lo, tuple(bounds), region, tuple(certs))


def _run_chunk(args) -> list:
    config, indices = args
    return [run_sample(config, i) for i in indices]


def run_venn(config: ExperimentConfig = ExperimentConfig(), workers: int = 1) -> VennReport:
    """Classify ``sample_count`` random pairs by which graphs give the best bound.

    Samples whose bisection hit an inconclusive LMI are counted separately and
    left out of the seven regions.
    """
    indices = list(range(config.sample_count))
    if workers > 1:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_run_chunk, [(config, c) for c in chunks]))
        samples = sorted((s for part in parts for s in part), key=lambda s: s.index)
    else:
        samples = [run_sample(config, i) for i in indices]
    counts = {name: 0 for name in region_names(config.graphs)}
    counts[INCONCLUSIVE] = 0
    for s in samples:
        counts[s.region] += 1
    return VennReport(config, counts, samples)
