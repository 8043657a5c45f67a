import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from softarith.netlist import NetlistBuilder, stats, validate
from softarith.ppgen import Row, generate_unrolled
from softarith.reduction import (ALGORITHMS, best_placement,
                                 brute_force_placement, chain_signature,
                                 dadda_heights, dedup_chains,
                                 final_chain_fa_count, synthesize)

from conftest import product_ok


# -- equivalence -----------------------------------------------------------

@pytest.mark.parametrize("algorithm", ALGORITHMS)
@pytest.mark.parametrize("constant", [0, 1, 3, 0b1011, 0b110101, 255])
def test_constant_multipliers_exact(algorithm, constant):
    res = synthesize(algorithm, 4, constant=constant)
    assert validate(res.netlist) == []
    assert product_ok(res.netlist, 4, constant=constant)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_generic_multipliers_exact(algorithm):
    for wa, wb in ((2, 2), (3, 4), (5, 5)):
        res = synthesize(algorithm, wa, width_b=wb)
        assert product_ok(res.netlist, wa, width_b=wb)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(ALGORITHMS), st.integers(1, 6),
       st.integers(0, 2**12 - 1))
def test_equivalence_property(algorithm, width, constant):
    res = synthesize(algorithm, width, constant=constant)
    assert product_ok(res.netlist, width, constant=constant)


def test_baseline_emulation_exact():
    for constant in (0b1011, 0b100101):
        res = synthesize("cascade", 5, constant=constant, baseline=True,
                         dedup=False)
        assert product_ok(res.netlist, 5, constant=constant)


# -- placement DP vs oracle ------------------------------------------------

def _random_rows(rng, n_rows, width):
    rows = []
    sig = 100
    for _ in range(n_rows):
        shift = rng.randrange(0, 4)
        if rng.random() < 0.3 and rows:
            src = rng.choice(rows)
            rows.append(Row(shift=src.shift, bits=list(src.bits)))
        else:
            rows.append(Row(shift=shift, bits=[sig + i for i in range(width)]))
            sig += width
    return rows


def test_best_placement_matches_brute_force():
    rng = random.Random(7)
    for _ in range(60):
        rows = _random_rows(rng, rng.randrange(2, 7), rng.randrange(2, 5))
        assert best_placement(rows).strength == brute_force_placement(rows)


def test_best_placement_needs_two_rows():
    with pytest.raises(ValueError):
        best_placement([Row(shift=0, bits=[1, 2])])


def test_row_cap_falls_back_to_adjacent():
    rows = [Row(shift=i, bits=[100 + 4 * i + j for j in range(4)])
            for i in range(6)]
    capped = best_placement(rows, row_cap=4)
    assert capped.pairs == [(0, 1), (2, 3), (4, 5)]


def test_signature_is_order_insensitive():
    a = Row(shift=0, bits=[10, 11, 12])
    b = Row(shift=1, bits=[10, 11, 12])
    assert chain_signature(a, b) == chain_signature(b, a)


# -- dedup -----------------------------------------------------------------

def test_dedup_strict_improvement_for_equal_spaced_bits():
    # four set bits at equal spacing give two identically shaped first-stage
    # chains, so dedup must strictly cut the full-adder count
    for constant in (0b1111, 0b1010101, 0b1001001001, 0b10001000100010001):
        plain = synthesize("cascade", 6, constant=constant, dedup=False)
        deduped = synthesize("cascade", 6, constant=constant, dedup=True)
        assert stats(deduped.netlist).full_adders < stats(plain.netlist).full_adders
        assert product_ok(deduped.netlist, 6, constant=constant)


def test_dedup_never_hurts():
    rng = random.Random(11)
    for _ in range(20):
        width = rng.randrange(2, 7)
        constant = rng.randrange(1, 1 << 10)
        plain = synthesize("cascade", width, constant=constant, dedup=False)
        deduped = synthesize("cascade", width, constant=constant, dedup=True)
        assert (stats(deduped.netlist).full_adders
                <= stats(plain.netlist).full_adders)
        assert product_ok(deduped.netlist, width, constant=constant)


def test_dedup_chains_standalone():
    b = NetlistBuilder()
    a = b.add_input_bus("a", 2)
    s1, c1 = b.chain([(a[0], a[1]), (a[1], a[0])])
    s2, c2 = b.chain([(a[0], a[1]), (a[0], a[1])])
    b.set_output_bus("o", s1 + [c1] + s2 + [c2])
    net = b.build()
    out = dedup_chains(net)
    assert len(out.chains) == 1
    assert stats(out).full_adders == 2
    from softarith.sim import exhaustive_outputs
    assert list(exhaustive_outputs(net)["o"]) == list(exhaustive_outputs(out)["o"])


def test_dedup_noop_returns_same_object():
    res = synthesize("wallace", 4, constant=0b1101)
    assert dedup_chains(res.netlist) is res.netlist


# -- tree shapes -----------------------------------------------------------

def test_dadda_heights_sequence():
    assert dadda_heights(28) == [2, 3, 4, 6, 9, 13, 19, 28]
    assert dadda_heights(2) == [2]


def test_wallace_final_chain_not_longer_than_dadda():
    for width in range(4, 9):
        w = synthesize("wallace", width, width_b=width)
        d = synthesize("dadda", width, width_b=width)
        assert (final_chain_fa_count(w.netlist)
                <= final_chain_fa_count(d.netlist))


def test_dadda_uses_no_more_compressors_than_wallace():
    for width in (5, 6, 7, 8):
        w = stats(synthesize("wallace", width, width_b=width).netlist)
        d = stats(synthesize("dadda", width, width_b=width).netlist)
        assert (d.full_adders + d.half_adders
                <= w.full_adders + w.half_adders)


def test_plan_records_stages():
    res = synthesize("wallace", 6, width_b=6)
    assert res.plan.algorithm == "wallace"
    assert len(res.plan.stages) >= 2
    doc = res.plan.to_jsonable()
    assert doc["final_chain_length"] == res.plan.final_chain_length


def test_final_chain_fa_count_empty():
    b = NetlistBuilder()
    b.add_input_bus("a", 1)
    assert final_chain_fa_count(b.build()) == 0


# -- argument checking -----------------------------------------------------

def test_synthesize_argument_validation():
    with pytest.raises(ValueError):
        synthesize("cascade", 4)
    with pytest.raises(ValueError):
        synthesize("cascade", 4, constant=3, width_b=4)
    with pytest.raises(ValueError):
        synthesize("booth", 4, constant=3)
