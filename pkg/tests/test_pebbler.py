"""Framework pebblers against the brute-force oracle and the golden columns."""

import json

import pytest
from hypothesis import given, settings, strategies as st

from chainpebble.owf import builtin, iterate
from chainpebble.pebbler import (
    ExhaustedError,
    Pebbler,
    reverse_oracle,
    run_outputs,
    run_trace,
    trace_csv_lines,
    trace_jsonl_lines,
)
from chainpebble.schedule import FAMILIES, work_sequence

MIX = builtin("testmix64")
SEED = bytes.fromhex("0123456789abcdef")

# per-round storage columns for order 4, one per family (start-of-round counts)
STORAGE_COLUMNS_K4 = {
    "rushing": [1] * 15 + [5, 4, 4, 3, 4, 3, 3, 2, 4, 3, 3, 2, 3, 2, 2, 1],
    "speed1": [1, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 5,
               4, 6, 5, 5, 4, 5, 4, 4, 3, 4, 3, 3, 2, 2, 1],
    "speed2": [1] * 8 + [2, 2, 2, 2, 3, 3, 4, 5] + [4] * 8 + [3, 3, 3, 3, 2, 2, 1],
    "optimal": [1] * 8 + [2, 2, 2, 2, 2, 3, 3, 5] + [4] * 8 + [3, 3, 3, 3, 2, 2, 1],
}


def test_reverse_oracle_shape():
    assert reverse_oracle(MIX, 0, SEED) == [SEED]
    chain = reverse_oracle(MIX, 3, SEED)
    assert len(chain) == 8
    assert chain[0] == iterate(MIX, SEED, 7)
    assert chain[-1] == SEED


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", range(13))
def test_reversal_matches_oracle(family, k):
    assert run_outputs(MIX, family, k, SEED) == reverse_oracle(MIX, k, SEED)


@pytest.mark.parametrize("family", FAMILIES)
def test_reversal_exhaustive_small_orders(family):
    for seed_int in range(256):
        seed = seed_int.to_bytes(8, "big")
        for k in range(7):
            assert run_outputs(MIX, family, k, seed) == reverse_oracle(MIX, k, seed)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 8), st.sampled_from(FAMILIES))
def test_reversal_random_seeds(seed_int, k, family):
    seed = seed_int.to_bytes(8, "big")
    assert run_outputs(MIX, family, k, seed) == reverse_oracle(MIX, k, seed)


def test_order_zero_single_round():
    p = Pebbler(MIX, "optimal", 0, SEED)
    assert p.lifetime == 1
    assert p.storage() == 1
    res = p.step()
    assert (res.round, res.hashes, res.output) == (1, 0, SEED)
    with pytest.raises(ExhaustedError):
        p.step()


def test_order_one_three_rounds():
    p = Pebbler(MIX, "speed1", 1, SEED)
    first = p.step()
    assert (first.hashes, first.output) == (1, None)
    second = p.step()
    assert second.output == iterate(MIX, SEED, 1) and second.hashes == 0
    third = p.step()
    assert third.output == SEED
    assert p.exhausted


@pytest.mark.parametrize("family", FAMILIES)
def test_first_output_round_is_free(family):
    for k in (1, 3, 5):
        p = Pebbler(MIX, family, k, SEED)
        for _ in range((1 << k) - 1):
            assert p.step().output is None
        res = p.step()
        assert res.hashes == 0
        assert res.output == iterate(MIX, SEED, (1 << k) - 1)


def test_one_output_per_reversal_round():
    for family in FAMILIES:
        p = Pebbler(MIX, family, 5, SEED)
        outputs = [p.step().output is not None for _ in range(p.lifetime)]
        assert outputs == [False] * 31 + [True] * 32


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", range(13))
def test_trace_work_matches_recurrence(family, k):
    rows = run_trace(MIX, family, k, SEED)
    assert [row.hashes for row in rows[1 << k:]] == work_sequence(family, k)
    assert rows[(1 << k) - 1].hashes == 0  # the free first-output round


def test_spot_round_budgets():
    speed2 = run_trace(MIX, "speed2", 4, SEED)
    assert speed2[20].round == 21 and speed2[20].hashes == 3
    rushing = run_trace(MIX, "rushing", 4, SEED)
    assert rushing[22].round == 23 and rushing[22].hashes == 7


@pytest.mark.parametrize("family", FAMILIES)
def test_storage_golden_columns(family):
    rows = run_trace(MIX, family, 4, SEED)
    assert [row.storage for row in rows] == STORAGE_COLUMNS_K4[family]


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k", range(1, 13))
def test_storage_endpoints(family, k):
    rows = run_trace(MIX, family, k, SEED)
    assert rows[0].storage == 1
    assert rows[(1 << k) - 1].storage == k + 1


@pytest.mark.parametrize("k", range(1, 11))
def test_storage_maxima(k):
    by_family = {
        family: max(row.storage for row in run_trace(MIX, family, k, SEED))
        for family in FAMILIES
    }
    assert by_family["speed1"] == max(k + 1, 2 * k - 2)
    assert by_family["speed2"] == k + 1
    assert by_family["optimal"] == k + 1
    assert by_family["rushing"] == k + 1


@pytest.mark.parametrize("k", range(13))
def test_rushing_total_hashes(k):
    rows = run_trace(MIX, "rushing", k, SEED)
    want = k * (1 << (k - 1)) if k else 0
    assert sum(row.hashes for row in rows) == want


def test_child_order_is_irrelevant():
    for family in FAMILIES:
        down = run_trace(MIX, family, 6, SEED, child_order="descending")
        up = run_trace(MIX, family, 6, SEED, child_order="ascending")
        assert down == up


def test_md5_reversal_spot():
    md5 = builtin("md5")
    seed = bytes.fromhex("d41d8cd98f00b204e9800998ecf8427e")
    for family in FAMILIES:
        assert run_outputs(md5, family, 4, seed) == reverse_oracle(md5, 4, seed)


def test_trace_serialization():
    rows = run_trace(MIX, "optimal", 2, SEED)
    csv = list(trace_csv_lines(rows))
    assert csv[0] == "round,hashes,storage,output"
    assert len(csv) == 8
    assert csv[1].startswith("1,0,1,") and csv[1].endswith(",")  # no output yet
    assert csv[4] == f"4,0,3,{iterate(MIX, SEED, 3).hex()}"
    parsed = [json.loads(line) for line in trace_jsonl_lines(rows)]
    assert parsed[0] == {"round": 1, "hashes": 0, "storage": 1, "output": None}
    assert parsed[3]["output"] == iterate(MIX, SEED, 3).hex()
