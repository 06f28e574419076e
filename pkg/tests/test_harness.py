import numpy as np
import pytest

from coamoeba.arrangement import dual_arrangement, is_admissible
from coamoeba.errors import CoamoebaError
from coamoeba.harness import (CIRCUIT_SHAPES, circuit_corpus, index_range_batch,
                              pentagon_parameter, random_dual_arrangement, safe_call, search_admissible,
                              shell_class_offsets, standard_polygons, verify_theorem1)
from coamoeba.lattice import SIMPLEX, SQUARE, pentagon


def test_shell_class_offsets_sum():
    rng = np.random.default_rng(0)
    for polygon in standard_polygons().values():
        offs = shell_class_offsets(polygon, rng)
        n = sum(len(g) for g in offs)
        total = sum(sum(g) for g in offs)
        assert ((total - n * np.pi) / (2 * np.pi)) == pytest.approx(round((total - n * np.pi) / (2 * np.pi)),
                                                                  abs=1e-9)


def test_pentagon_parameter():
    assert pentagon_parameter(pentagon(3)) == 3
    assert pentagon_parameter(SQUARE) is None


def test_sweep_on_small_polygons():
    for polygon in (SIMPLEX, SQUARE):
        report = verify_theorem1(polygon, samples=10, seed=3)
        assert report.ok and len(report.samples) == 10
        assert report.max_angle_residual < 1e-9
        assert report.to_dict()["discrepancies"] == []


def test_search_finds_k1():
    report = search_admissible(pentagon(1), budget=2000, seed=0)
    assert report.found
    arr = dual_arrangement(pentagon(1), report.offsets)
    assert is_admissible(arr)
    assert report.to_dict()["status"] == "found"


def test_search_short_circuits_obstructed_members():
    report = search_admissible(pentagon(6), budget=10 ** 9)
    assert not report.found and report.tried == 0
    assert report.obstruction == {"k": 6, "m": 5, "obstructed": True}


def test_search_exhaustion_is_reported():
    report = search_admissible(pentagon(3), budget=5000, seed=1)
    assert not report.found and report.tried == 5000
    assert report.to_dict()["status"] == "exhausted"
    assert sum(report.range_histogram.values()) == 5000


def test_range_batch_matches_arrangements():
    polygon = pentagon(1)
    deltas = [f.primitive_dir for f in polygon.facets for _ in range(f.lattice_length)]
    rng = np.random.default_rng(5)
    for _ in range(10):
        arr = random_dual_arrangement(polygon, rng)
        offs = np.array([[c.offset for c in arr.curves]])
        assert (index_range_batch(deltas, offs)[0] <= 2) == is_admissible(arr)


def test_circuit_corpus_is_balanced():
    corpus = circuit_corpus(20, seed=0)
    shapes = [s for s, _ in corpus]
    assert all(shapes.count(s) == 5 for s in CIRCUIT_SHAPES)
    for shape, f in corpus:
        assert sorted(f.support) == sorted(CIRCUIT_SHAPES[shape])


def test_safe_call():
    def boom():
        raise CoamoebaError("x")
    assert safe_call(lambda: 3) == (3, None)
    value, err = safe_call(boom)
    assert value is None and isinstance(err, CoamoebaError)
