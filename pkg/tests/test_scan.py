import json

import numpy as np
import pytest

from dihedral.errors import CellCap
from dihedral.scan import Axis, FixedState, RandomSeeded, ScanRequest, run_scan


@pytest.fixture(scope="module")
def limacon_map(scenarios):
    req = ScanRequest(4, (Axis(0.5, 2.0, 51), Axis(-1.0, 1.0, 51)), FixedState(scenarios["limacon4"].initial))
    return run_scan(req)


class TestAxis:
    def test_values(self):
        np.testing.assert_allclose(Axis(0, 1, 5).values, [0, 0.25, 0.5, 0.75, 1])

    @pytest.mark.parametrize("args", [(0, 1, 1), (0, 1, 2.5), (1, 0, 3), (0, float("inf"), 3),
                                      (float("nan"), 1, 3)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            Axis(*args)


class TestLimaconMap:
    def test_one_record_per_cell(self, limacon_map):
        assert limacon_map.shape == (51, 51)
        assert [c.index for c in limacon_map.cells] == list(range(51 * 51))

    def test_resonance_line(self, limacon_map):
        on_line = [c for c in limacon_map.cells if abs(c.couplings[1] + c.couplings[0] / 2) < 1e-9]
        assert len(on_line) == 7
        for c in on_line:
            assert c.category in ("EquivariantChoreography", "EquivariantFragmented")
            assert c.ratios == (1, 2)

    def test_unstable_half_plane(self, limacon_map):
        below = [c for c in limacon_map.cells if c.couplings[1] <= -c.couplings[0] + 1e-12]
        assert below
        assert all(c.category == "Unbounded" for c in below)
        above = [c for c in limacon_map.cells if c.couplings[1] > -c.couplings[0] + 1e-12]
        assert not any(c.category == "Unbounded" for c in above)

    def test_quasiperiodic_dominant(self, limacon_map):
        cats = [c.category for c in limacon_map.cells if c.couplings[1] > -c.couplings[0]]
        assert cats.count("Quasiperiodic") > 0.9 * len(cats)

    def test_grid_view(self, limacon_map):
        grid = limacon_map.category_grid()
        assert grid.shape == (51, 51)
        # kappa1 = 0.5, kappa2 = -1 is on the unstable side
        assert grid[0, 0] == "Unbounded"

    def test_outputs(self, limacon_map):
        rows = limacon_map.to_csv().splitlines()
        assert rows[0] == "cell,kappa1,kappa2,category,ratios"
        assert len(rows) == 51 * 51 + 1
        payload = json.loads(limacon_map.to_json())
        assert payload["shape"] == [51, 51]
        assert payload["provenance"]["probe"]["kind"] == "fixed"
        assert payload["provenance"]["tolerances"]["commensurability_rel"] == 1e-6


class TestDeterminism:
    def request(self, **kw):
        return ScanRequest(6, (Axis(1, 3, 4), Axis(-1, 0, 3), Axis(0, 1, 3)), RandomSeeded(7, trials=3), **kw)

    def test_repeatable(self):
        assert run_scan(self.request()).to_json() == run_scan(self.request()).to_json()

    def test_parallel_matches_sequential(self):
        seq = run_scan(self.request())
        par = run_scan(self.request(), workers=2, chunk=5)
        assert par.to_json() == seq.to_json()
        assert par.to_csv() == seq.to_csv()

    def test_cell_independent_of_grid(self):
        # the probe of a cell depends only on (seed, cell index)
        a = list(RandomSeeded(3).states(4, 17))
        b = list(RandomSeeded(3).states(4, 17))
        c = list(RandomSeeded(3).states(4, 18))
        assert all(x.allclose(y) for x, y in zip(a, b))
        assert not a[0].allclose(c[0])

    def test_modal_counts(self):
        res = run_scan(self.request())
        for c in res.cells:
            assert sum(c.counts.values()) == 3
            assert c.counts[c.category] == max(c.counts.values())


class TestLimits:
    def test_cell_cap(self):
        req = ScanRequest(4, (Axis(0, 1, 4), Axis(0, 1, 4)), RandomSeeded(0), cell_cap=15)
        with pytest.raises(CellCap):
            run_scan(req)

    def test_axis_count(self):
        with pytest.raises(ValueError):
            ScanRequest(6, (Axis(0, 1, 2),), RandomSeeded(0))

    def test_degenerate_cells_recorded(self):
        # zero couplings: every random probe drifts
        req = ScanRequest(4, (Axis(0, 0, 2), Axis(0, 0, 2)), RandomSeeded(1, trials=2))
        assert {c.category for c in run_scan(req).cells} == {"Unbounded"}
