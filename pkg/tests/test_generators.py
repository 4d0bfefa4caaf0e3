import pytest

from intervalpc.generators import (GenSpec, exhaustive_interval_models,
                                   gen_biconvex, gen_interval)
from intervalpc.graphcore import build_ordering


def test_interval_determinism():
    spec = GenSpec(kind="interval", n=9, density=0.5, seed=123, count=3)
    a = gen_interval(spec)
    b = gen_interval(spec)
    assert [m.intervals for m in a] == [m.intervals for m in b]


def test_interval_density_extremes():
    full = build_ordering(gen_interval(GenSpec(n=7, density=1.0, seed=5))[0])
    assert full.edge_count() == 7 * 6 // 2
    empty = build_ordering(gen_interval(GenSpec(n=7, density=0.0, seed=5))[0])
    assert empty.edge_count() == 0


def test_biconvex_determinism_and_validity():
    spec = GenSpec(kind="biconvex", nx=5, ny=4, density=0.5, seed=9, count=4)
    a = gen_biconvex(spec)
    b = gen_biconvex(spec)
    assert [sorted(g.edges) for g in a] == [sorted(g.edges) for g in b]
    # the constructor re-validates convexity of both sides


def test_biconvex_density_extremes():
    full = gen_biconvex(GenSpec(kind="biconvex", nx=4, ny=3, density=1.0, seed=1))[0]
    assert len(full.edges) == 12
    empty = gen_biconvex(GenSpec(kind="biconvex", nx=4, ny=3, density=0.0, seed=1))[0]
    assert not empty.edges


def test_spec_validation():
    with pytest.raises(ValueError):
        GenSpec(density=1.5)
    with pytest.raises(ValueError):
        GenSpec(n=-1)


def test_exhaustive_models_complete_for_n3():
    models = list(exhaustive_interval_models(3))
    assert len(models) == 6  # product of 1*2*3 window choices
    graphs = {tuple(build_ordering(m).window[1:]) for m in models}
    assert len(graphs) == 6
