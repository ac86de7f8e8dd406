"""Card-chain codec: encode/decode goldens, edits, and round-trip accuracy."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzydeck.cards import (
    CardChain,
    CardEdit,
    apply_edit,
    cards_to_values,
    choose_precision,
    values_to_cards,
    values_to_cards_auto,
)
from fuzzydeck.errors import EditError, OrderingError, PrecisionError


def chain(gaps, lower=0.0, upper=1.0, precision=2):
    labels = [f"a{i}" for i in range(len(gaps) + 1)]
    return CardChain(lower=lower, upper=upper, precision=precision,
                     anchors=labels, gaps=tuple(gaps))


class TestChoosePrecision:
    def test_one_digit_suffices(self):
        assert choose_precision((0, 0.18, 0.43, 0.72, 1)) == 1

    def test_close_pair_needs_three_digits(self):
        assert choose_precision((0, 0.501, 0.502, 1)) == 3

    def test_endpoints_only(self):
        assert choose_precision((0, 1)) == 1

    def test_non_strict_tuple_rejected(self):
        with pytest.raises(OrderingError):
            choose_precision((0, 0.5, 0.5, 1))

    def test_unresolvable_pair_errors(self):
        with pytest.raises(PrecisionError):
            choose_precision((0, 0.5, 0.5 + 1e-11, 1))


class TestEncode:
    def test_unit_interval_golden(self):
        c = values_to_cards((0, 0.18, 0.43, 0.72, 1),
                            ("a", "v_1", "v_2", "v_3", "b"), precision=2)
        assert c.gaps == (18, 25, 29, 28)
        assert c.total == 100

    def test_scaled_domain_golden(self):
        vals = (2.8, 3.849, 5.683, 7.093, 8.318, 9.774, 10.0)
        c = values_to_cards(vals, ("a", "v_1", "v_2", "v_3", "v_4", "v_5", "b"),
                            precision=2)
        assert c.gaps == (14, 26, 19, 17, 20, 4)

    def test_endpoints_only_trivial(self):
        c = values_to_cards((0, 1), ("a", "b"), precision=1)
        assert c.gaps == (10,)

    def test_collision_raises_precision_error(self):
        with pytest.raises(PrecisionError):
            values_to_cards((0, 0.501, 0.502, 1), ("a", "x", "y", "b"), precision=2)

    def test_auto_encode_raises_precision_on_collision(self):
        c = values_to_cards_auto((0, 0.501, 0.502, 1), ("a", "x", "y", "b"),
                                 precision=2)
        assert c.precision == 3
        assert c.total == 1000

    def test_decimal_boundary_floor(self):
        # 0.29 * 100 is 28.999... in binary; the floor must still be 29.
        c = values_to_cards((0, 0.29, 1), ("a", "x", "b"), precision=2)
        assert c.gaps == (29, 71)

    def test_determinism(self):
        vals = (0, 0.18, 0.43, 0.72, 1)
        labels = ("a", "v_1", "v_2", "v_3", "b")
        assert values_to_cards(vals, labels, 2) == values_to_cards(vals, labels, 2)


class TestDecode:
    def test_step1_golden(self):
        c = chain((14, 26, 19, 17, 15, 9), lower=2.8, upper=10.0)
        got = c.interior_values()
        assert got == pytest.approx([3.808, 5.68, 7.048, 8.272, 9.352], abs=5e-4)

    def test_step2_golden(self):
        c = chain((14, 19, 7, 14, 5, 12, 5, 14, 10), lower=2.8, upper=10.0)
        got = cards_to_values(c)
        expected = [2.8, 3.808, 5.176, 5.68, 6.688, 7.048, 7.912, 8.272, 9.28, 10.0]
        assert got == pytest.approx(expected, abs=5e-4)

    def test_fine_precision_golden(self):
        c = chain((193, 491, 232, 84), lower=0.40, upper=0.46, precision=3)
        got = c.interior_values()
        assert got == pytest.approx([0.41158, 0.44104, 0.45496], abs=1e-9)

    def test_endpoints_pinned_exactly(self):
        c = chain((3, 4, 3), lower=2.8, upper=10.0)
        vals = c.values()
        assert vals[0] == 2.8 and vals[-1] == 10.0

    def test_three_object_preference_scale(self):
        # l1 [4] l2 [6] l3 on a ten-card deck values the middle object at 0.4
        c = chain((4, 6))
        assert cards_to_values(c) == [0.0, 0.4, 1.0]


class TestEdits:
    def test_move_golden(self):
        c = chain((14, 26, 19, 17, 20, 4), lower=2.8, upper=10.0)
        edited = apply_edit(c, CardEdit(kind="move", gap_index=4, count=5,
                                        target_gap_index=5))
        assert edited.gaps == (14, 26, 19, 17, 15, 9)
        assert edited.total == c.total == 100

    def test_insert_grows_total(self):
        c = chain((18, 25, 29, 28))
        edited = apply_edit(c, CardEdit(kind="insert", gap_index=1, count=5))
        assert edited.gaps == (18, 30, 29, 28)
        assert edited.total == 105

    def test_remove_shrinks_total(self):
        c = chain((18, 25, 29, 28))
        edited = apply_edit(c, CardEdit(kind="remove", gap_index=3, count=4))
        assert edited.gaps == (18, 25, 29, 24)
        assert edited.total == 96

    def test_zero_count_rejected(self):
        with pytest.raises(EditError):
            CardEdit(kind="remove", gap_index=0, count=0)

    def test_collapse_rejected(self):
        c = chain((2, 5, 5))
        with pytest.raises(EditError):
            apply_edit(c, CardEdit(kind="remove", gap_index=0, count=2))
        with pytest.raises(EditError):
            apply_edit(c, CardEdit(kind="move", gap_index=0, count=2,
                                   target_gap_index=1))

    def test_move_preserves_anchors_and_domain(self):
        c = chain((10, 10, 10), lower=-1.0, upper=3.0)
        edited = apply_edit(c, CardEdit(kind="move", gap_index=0, count=3,
                                        target_gap_index=2))
        assert edited.anchors == c.anchors
        assert (edited.lower, edited.upper) == (c.lower, c.upper)

    def test_edit_round_trips_through_json(self):
        e = CardEdit(kind="move", gap_index=1, count=2, target_gap_index=0)
        assert CardEdit.from_dict(json.loads(json.dumps(e.to_dict()))) == e


class TestWireFormat:
    def test_field_names(self):
        c = chain((18, 25, 29, 28))
        doc = c.to_dict()
        assert set(doc) == {"domain", "precision", "total", "anchors", "gaps"}
        assert doc["domain"] == [0.0, 1.0]
        assert doc["total"] == 100
        assert doc["anchors"][0] == {"label": "a0", "cumulative": 0}
        assert doc["anchors"][-1] == {"label": "a4", "cumulative": 100}
        assert CardChain.from_dict(doc) == c

    def test_rejects_empty_gap(self):
        with pytest.raises(EditError):
            chain((5, 0, 5))


@st.composite
def increasing_tuples(draw):
    lo = draw(st.floats(min_value=-100, max_value=100, allow_nan=False))
    span = draw(st.floats(min_value=0.5, max_value=200, allow_nan=False))
    n = draw(st.integers(min_value=1, max_value=8))
    # fractions separated enough that p <= 4 always suffices
    fracs = draw(
        st.lists(st.integers(min_value=1, max_value=9999), min_size=n, max_size=n,
                 unique=True).map(sorted)
    )
    interior = [lo + span * f / 10000 for f in fracs]
    return [lo, *interior, lo + span]


class TestRoundTrip:
    @given(increasing_tuples())
    @settings(max_examples=300, deadline=None)
    def test_decode_error_below_quantum(self, vals):
        lo, hi = vals[0], vals[-1]
        span = hi - lo
        normalized = [(v - lo) / span for v in vals]
        normalized[0], normalized[-1] = 0.0, 1.0
        p = choose_precision(normalized)
        labels = [f"a{i}" for i in range(len(vals))]
        c = values_to_cards(vals, labels, p)
        decoded = cards_to_values(c)
        quantum = span * 10.0**-p
        for orig, dec in zip(vals, decoded):
            assert abs(orig - dec) < quantum + 1e-12 * max(1.0, abs(orig))

    @given(increasing_tuples())
    @settings(max_examples=100, deadline=None)
    def test_total_is_ten_to_p(self, vals):
        lo, hi = vals[0], vals[-1]
        span = hi - lo
        normalized = [(v - lo) / span for v in vals]
        normalized[0], normalized[-1] = 0.0, 1.0
        p = choose_precision(normalized)
        labels = [f"a{i}" for i in range(len(vals))]
        assert values_to_cards(vals, labels, p).total == 10**p
