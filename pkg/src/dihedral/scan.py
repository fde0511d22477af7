"""Classification maps over a grid in coupling space.

Every cell is classified independently.  Random probes draw from a
generator seeded by ``(seed, cell_index)``, so a cell's result does not
depend on which other cells are evaluated or in what order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CellCap, DihedralError
from .model import Convention, SystemSpec
from .modes import PhaseState
from .resonance import Category, Tolerances, classify

__all__ = ["Axis", "RandomSeeded", "FixedState", "ScanRequest", "CellResult", "ScanResult", "run_scan"]

DEFAULT_CELL_CAP = 10 ** 6
SCAN_TOLERANCES = Tolerances(commensurability_rel=1e-6)

# tie-break order for the modal category
_ORDER = [c.value for c in Category]


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    resolution: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError("axis bounds must be finite")
        if self.max < self.min:
            raise ValueError(f"axis max {self.max} below min {self.min}")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError(f"resolution must be an integer >= 2, got {self.resolution}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.resolution))


@dataclass(frozen=True)
class RandomSeeded:
    """Standard-normal positions and momenta, ``trials`` draws per cell."""

    seed: int
    trials: int = 5

    def states(self, n, cell_index):
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, cell_index]))
        for _ in range(self.trials):
            yield PhaseState(0.0, rng.standard_normal((n, 2)), rng.standard_normal((n, 2)))

    def to_dict(self):
        return {"kind": "random", "seed": self.seed, "trials": self.trials}


@dataclass(frozen=True, eq=False)
class FixedState:
    state: PhaseState

    def states(self, n, cell_index):
        yield self.state

    def to_dict(self):
        return {"kind": "fixed",
                "positions": self.state.positions.tolist(),
                "momenta": self.state.momenta.tolist()}


@dataclass(frozen=True, eq=False)
class ScanRequest:
    n: int
    axes: tuple
    probe: object
    convention: Convention = Convention.LISTED_ONCE
    tolerances: Tolerances = SCAN_TOLERANCES
    mass: float = 1.0
    omega: float = 1.0
    cell_cap: int = DEFAULT_CELL_CAP

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "convention", Convention(self.convention))
        if len(self.axes) != self.n // 2:
            raise ValueError(f"n={self.n} needs {self.n // 2} axes, got {len(self.axes)}")

    @property
    def shape(self) -> tuple:
        return tuple(int(a.resolution) for a in self.axes)

    @property
    def n_cells(self) -> int:
        return math.prod(self.shape)


@dataclass(frozen=True)
class CellResult:
    index: int
    couplings: tuple
    category: str
    counts: dict
    ratios: tuple | None

    def row(self):
        return [self.index, *self.couplings, self.category, self.ratios_text]

    @property
    def ratios_text(self) -> str:
        return "" if self.ratios is None else ":".join(str(m) for m in self.ratios)


@dataclass(frozen=True)
class ScanResult:
    n: int
    shape: tuple
    axes: tuple
    cells: tuple
    provenance: dict = field(default_factory=dict)

    def category_grid(self) -> np.ndarray:
        return np.array([c.category for c in self.cells], dtype=object).reshape(self.shape)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cell"] + [f"kappa{k}" for k in range(1, len(self.shape) + 1)] + ["category", "ratios"])
        for c in self.cells:
            w.writerow([c.index] + [repr(float(x)) for x in c.couplings] + [c.category, c.ratios_text])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "shape": list(self.shape),
            "axes": [{"min": a.min, "max": a.max, "resolution": a.resolution} for a in self.axes],
            "provenance": self.provenance,
            "cells": [
                {"cell": c.index, "couplings": list(c.couplings), "category": c.category,
                 "counts": c.counts, "ratios": None if c.ratios is None else list(c.ratios)}
                for c in self.cells
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=True)


def _cell_couplings(request, index):
    idx = np.unravel_index(index, request.shape)
    return tuple(float(a.values[i]) for a, i in zip(request.axes, idx))


def _evaluate(request, index):
    kappa = _cell_couplings(request, index)
    spec = SystemSpec(request.n, kappa, request.mass, request.omega, request.convention)
    counts = Counter()
    ratios = None
    for state in request.probe.states(request.n, index):
        try:
            c = classify(spec, state, request.tolerances)
        except DihedralError as exc:
            counts[f"Error:{type(exc).__name__}"] += 1
            continue
        counts[c.category.value] += 1
        if ratios is None and c.profile is not None and c.profile.commensurate:
            ratios = c.profile.ratios
    modal = min(counts, key=lambda k: (-counts[k], _ORDER.index(k) if k in _ORDER else len(_ORDER), k))
    return CellResult(index, kappa, modal, dict(sorted(counts.items())), ratios)


def _evaluate_chunk(args):
    request, indices = args
    return [_evaluate(request, i) for i in indices]


def run_scan(request: ScanRequest, workers: int | None = None, chunk: int = 64) -> ScanResult:
    """Classify every cell of the grid.

    ``workers > 1`` evaluates chunks of cells in separate processes; the
    result is identical to a sequential run.

    Raises
    ------
    CellCap
        If the grid has more cells than ``request.cell_cap``.
    """
    total = request.n_cells
    if total > request.cell_cap:
        raise CellCap(f"{total} cells exceed the cap of {request.cell_cap}")
    indices = range(total)
    if workers and workers > 1:
        chunks = [(request, list(indices[i:i + chunk])) for i in range(0, total, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(itertools.chain.from_iterable(pool.map(_evaluate_chunk, chunks)))
    else:
        cells = [_evaluate(request, i) for i in indices]
    provenance = {
        "probe": request.probe.to_dict(),
        "tolerances": request.tolerances.to_dict(),
        "convention": request.convention.value,
        "mass": request.mass,
        "omega": request.omega,
    }
    return ScanResult(request.n, request.shape, request.axes, tuple(cells), provenance)
