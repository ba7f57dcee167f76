from __future__ import annotations

import json

import numpy as np
import pytest
import sympy

from friends20.search import (
    CheckpointError,
    SearchConfig,
    certify,
    naive_scan,
    scan_report,
    shape_mask,
    sigma_sieve,
    structured_search,
)


def test_a_max_and_bounds():
    cfg = SearchConfig()
    assert cfg.a_max == 8
    assert 2 * 5**16 <= cfg.limit < 2 * 5**18
    assert cfg.m_bound(1) == 200000
    with pytest.raises(ValueError):
        SearchConfig(limit=10)


@pytest.mark.parametrize("shards", [1, 2, 7])
def test_shards_partition_m_space(shards):
    cfg = SearchConfig(limit=10**9, shard_count=shards)
    for a in range(1, cfg.a_max + 1):
        ranges = sorted((lo, hi) for b, lo, hi in cfg.shards() if b == a)
        covered = [m for lo, hi in ranges for m in range(lo, hi + 1)]
        assert covered == list(range(1, cfg.m_bound(a) + 1))


def test_sigma_sieve_matches_sympy():
    sig = sigma_sieve(5000)
    assert [int(x) for x in sig[1:]] == [sympy.divisor_sigma(n) for n in range(1, 5001)]
    assert sig[6] == 12 and sig[28] == 56 and sig[20] == 42
    with pytest.raises(ValueError):
        sigma_sieve(10**9)


def test_naive_scan_finds_nothing_small():
    assert naive_scan(10**6) == []


def test_shape_mask_against_direct_enumeration():
    limit = 10**7
    direct = set()
    for a in range(1, 10):
        base = 2 * 25**a
        m = 1
        while base * m * m <= limit:
            if sympy.gcd(m, 210) == 1:
                direct.add(base * m * m)
            m += 1
    assert set(np.nonzero(shape_mask(limit))[0].tolist()) == direct


def test_structured_agrees_with_naive_on_overlap():
    rep = structured_search(SearchConfig(limit=10**7))
    scan = scan_report(10**7)
    assert rep.friends_found == scan.shape_friends == scan.friends == []
    assert rep.candidates_tested == scan.shape_candidates == 128


def test_shard_count_does_not_change_results():
    one = structured_search(SearchConfig(limit=10**10, shard_count=1))
    many = structured_search(SearchConfig(limit=10**10, shard_count=5))
    assert one.candidates_tested == many.candidates_tested
    assert one.friends_found == many.friends_found == []
    again = structured_search(SearchConfig(limit=10**10, shard_count=5))
    assert again.shard_checksums == many.shard_checksums


def test_parallel_matches_serial():
    serial = structured_search(SearchConfig(limit=10**10, shard_count=4))
    parallel = structured_search(SearchConfig(limit=10**10, shard_count=4, workers=2))
    assert serial.shard_checksums == parallel.shard_checksums


def test_checkpoint_resume(tmp_path):
    path = tmp_path / "ck.txt"
    cfg = SearchConfig(limit=10**9, shard_count=3, checkpoint_path=str(path))
    first = structured_search(cfg)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + len(cfg.shards())
    # drop the last two shard records as if the run had been interrupted
    path.write_text("\n".join(lines[:-2]) + "\n")
    second = structured_search(cfg)
    assert second.resumed_shards == len(cfg.shards()) - 2
    assert second.shard_checksums == first.shard_checksums
    assert second.candidates_tested == first.candidates_tested


def test_checkpoint_corruption_aborts(tmp_path):
    path = tmp_path / "ck.txt"
    cfg = SearchConfig(limit=10**8, shard_count=2, checkpoint_path=str(path))
    structured_search(cfg)
    text = path.read_text()
    path.write_text(text[:-10])
    with pytest.raises(CheckpointError):
        structured_search(cfg)
    path.write_text(text.replace('"candidates"', '"candidatez"', 1))
    with pytest.raises(CheckpointError):
        structured_search(cfg)
    other = SearchConfig(limit=10**9, shard_count=2, checkpoint_path=str(path))
    path.write_text(text)
    with pytest.raises(CheckpointError):
        structured_search(other)


def test_report_is_json():
    rep = structured_search(SearchConfig(limit=10**8))
    d = rep.to_dict()
    assert json.loads(json.dumps(d)) == d


def test_certify_examples():
    r = certify(20)
    assert not r["is_friend"] and r["structural"] == []
    r = certify(2 * 5**2 * 11**2)
    assert r["structural"] == [] and not r["checks"]["omega_at_least_6"]
    assert "omega_at_least_6" in r["failed"]
    r = certify(2 * 11**2)
    assert r["structural"] == ["five-adic"]
    with pytest.raises(ValueError):
        certify(1)


def test_certify_congruence_witness():
    n = 2 * 5**2 * 11**2 * 13**2 * 17**2 * 19**2 * 23**2
    r = certify(n)
    assert r["checks"]["omega_at_least_6"] and r["checks"]["big_omega_bound"] is False
    assert 31 in r["witnesses"]["congruence"]
