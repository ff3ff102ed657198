import numpy as np
import pytest

from thetafay.chargeom import Characteristic, Parity, affine_action, characteristics, odd_base
from thetafay.symgroup import (
    GenusTooLarge,
    ParityMismatch,
    double_coset_count,
    enumerate_group,
    generators,
    is_symplectic_batch,
    orbit,
    read_enumeration,
    sp_order,
    stabilizer,
    transitivity_report,
    transporter,
    write_enumeration,
)

C = Characteristic.parse


def test_order_formula():
    assert [sp_order(g) for g in (1, 2, 3)] == [6, 720, 1451520]


def test_generators():
    assert len(generators(1).elements) == 2
    gens = generators(2)
    assert len(gens.elements) == 4
    assert [t for t, _ in gens.tags].count("T") == 3


@pytest.mark.parametrize("g", [1, 2, 3])
def test_enumeration(g):
    enum = enumerate_group(g)
    assert len(enum) == sp_order(g)
    assert np.all(np.diff(enum.codes.astype(np.int64)) > 0)
    assert is_symplectic_batch(enum.rows[:5000], g).all()


def test_enumeration_guard():
    with pytest.raises(GenusTooLarge):
        enumerate_group(4)


def test_dump_roundtrip(tmp_path):
    enum = enumerate_group(2)
    path = tmp_path / "sp2.bin"
    write_enumeration(path, enum)
    back = read_enumeration(path)
    assert back.g == 2 and np.array_equal(back.codes, enum.codes)
    assert path.stat().st_size == 12 + 720 * 2


@pytest.mark.parametrize("g,base,index", [
    (1, "0|0", 3), (2, "00|00", 10), (2, "10|10", 6)])
def test_stabilizer_index(g, base, index):
    H = stabilizer(C(base))
    assert sp_order(g) // len(H) == index
    assert all(affine_action(h, C(base)) == C(base) for h in H)


def test_transporter():
    for g in (1, 2, 3):
        for par in (Parity.EVEN, Parity.ODD):
            target = characteristics(g, par)[0]
            for m in characteristics(g, par):
                assert affine_action(transporter(m, target), m) == target
    assert transporter(C("0|0"), C("0|0")).is_identity()
    with pytest.raises(ParityMismatch):
        transporter(C("0|0"), C("1|1"))


def test_double_cosets():
    assert double_coset_count(C("0|0")) == 2
    assert double_coset_count(C("00|00")) == 2
    assert double_coset_count(odd_base(2)) == 2
    # a single odd characteristic at g = 1: K = G
    assert double_coset_count(odd_base(1)) == 1


def test_orbits_and_transitivity():
    assert len(orbit(C("0|0"))) == 3
    report = transitivity_report(2)
    assert report["ok"] and report["method"] == "exhaustive"
    assert report["even_double_transitive"]["orbit_size"] == 90
    assert report["even_odd_pairs"]["orbit_size"] == 60
    assert transitivity_report(3, exhaustive=False)["ok"]
