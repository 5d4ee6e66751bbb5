"""Smoke tests for the python bindings."""

import json
import math

import pytest

import macfb


def h(p):
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_binary_entropy_and_corner():
    assert macfb.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-14)
    corner = macfb.corner_point(0.1)
    for r in corner:
        assert r == pytest.approx(1 - h(0.1), abs=1e-12)


def test_seed_mixing_vectors():
    assert macfb.mix64(0) == 0xE220A8397B1DCDAF
    assert macfb.trial_seed(42, 1) == 0x7EB3B394AC9EFC29


def test_encode_and_decode():
    generator = [[1, 0, 1, 1], [0, 1, 0, 1]]
    assert macfb.encode(generator, [1, 1]) == [1, 1, 1, 0]
    codebook = [[0, 0, 0], [1, 1, 1]]
    assert macfb.ml_decode_bsc([1, 1, 0], codebook, 0.1) == 1
    with pytest.raises(ValueError):
        macfb.encode(generator, [1, 1, 1])


def test_sum_codebook_closure():
    a, _, s = macfb.sum_codebook_stats(6, 24, seed=3, kind="linear_identical")
    assert s == a
    a, b, s = macfb.sum_codebook_stats(8, 32, seed=3, kind="random_independent")
    assert s == pytest.approx(16.0, abs=0.5)


def test_channel_pmf_and_entropy():
    ch = macfb.ParityGatedMac(0.1)
    assert ch.state1(0, 0, 0)
    row = ch.pmf(1, 2, 3)
    assert sum(row) == pytest.approx(1.0, abs=1e-12)
    assert macfb.conditional_output_entropy(0.1, 0.0) == pytest.approx(3 * h(0.1), abs=1e-12)
    table = json.loads(ch.to_table_json())
    assert table["input_sizes"] == [4, 4, 4]
    assert len(table["pmf"]) == 4 * 4 * 4 * 8


def test_joint_pmf_measures():
    d = 0.1
    p = macfb.JointPmf([("X", 2), ("Y", 2)],
                       [0.5 * (1 - d), 0.5 * d, 0.5 * d, 0.5 * (1 - d)])
    assert p.entropy(["X"]) == pytest.approx(1.0, abs=1e-12)
    assert p.mutual_info(["X"], ["Y"]) == pytest.approx(1 - h(d), abs=1e-12)
    assert p.conditional_entropy(["Y"], ["X"]) == pytest.approx(h(d), abs=1e-12)


def test_run_trial_noiseless():
    report = macfb.run_trial(k=4, n=16, blocks=4, delta=0.0, seed=3)
    assert report.e1_count == 0
    assert report.msg_error_count == 0
    assert report.state1_fraction == 1.0
    assert report.nominal_rate == 0.25
    parsed = json.loads(report.to_json())
    assert len(parsed["e1"]) == 4


def test_region_evaluators():
    poly = json.loads(macfb.qlc_region_bit_pair(0.1, 2))
    assert len(poly["constraints"]) == 13
    assert poly["diagonal_boundary"] > 0

    ch = macfb.ParityGatedMac(0.1)
    rate = macfb.directed_info_rate(ch.to_table_json(), 1)
    assert 0 < rate < 3


def test_validation_errors():
    with pytest.raises(ValueError):
        macfb.ParityGatedMac(0.7)
    with pytest.raises(ValueError):
        macfb.corner_point(2.0)
