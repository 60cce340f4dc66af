"""Confusion counts, DR, CC, PREC and the Mann-Whitney AUC, all in percent."""

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bpeel.errors import LengthMismatch, NoFlagged, NoPositives, OneClassOnly
from bpeel.metrics import (
    Confusion,
    confusion,
    correct_classification,
    detection_rate,
    evaluate,
    precision,
    roc_auc,
)

import oracles


@st.composite
def scored_labels(draw, max_size=12, distinct=False):
    n = draw(st.integers(2, max_size))
    labels = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    assume(any(labels) and not all(labels))
    values = st.floats(-1e3, 1e3, allow_nan=False) if distinct else st.integers(-3, 3)
    scores = draw(st.lists(values, min_size=n, max_size=n, unique=distinct))
    return np.asarray(scores, dtype=float), np.asarray(labels)


class TestConfusion:
    def test_perfect_agreement(self):
        assert confusion([True, False, False], [True, False, False]) == Confusion(1, 0, 2, 0)

    def test_silent_detector(self):
        c = confusion([False] * 6, [True, True, True, False, False, False])
        assert (c.tp, c.fn) == (0, 3)

    def test_matches_elementwise_tally(self, rng):
        for _ in range(50):
            flags, labels = rng.random(20) < 0.3, rng.random(20) < 0.2
            c = confusion(flags, labels)
            assert (c.tp, c.fp, c.tn, c.fn) == oracles.brute_confusion(flags, labels)
            assert c.n == 20

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([True], [True, False])


class TestRates:
    def test_detection_rate(self):
        assert detection_rate(Confusion(tp=9, fp=0, tn=0, fn=1)) == 90.0
        assert detection_rate(Confusion(tp=0, fp=0, tn=3, fn=5)) == 0.0
        with pytest.raises(NoPositives):
            detection_rate(Confusion(tp=0, fp=2, tn=3, fn=0))

    def test_correct_classification(self):
        assert correct_classification(Confusion(3, 0, 7, 0)) == 100.0
        assert correct_classification(Confusion(tp=0, fp=0, tn=45, fn=5)) == 90.0

    def test_fixed_contamination_on_clean_data(self):
        # flagging 10% of 50 clean rows leaves 45 of 50 correct
        labels = np.zeros(50, dtype=bool)
        flags = np.zeros(50, dtype=bool)
        flags[:5] = True
        assert correct_classification(confusion(flags, labels)) == 90.0

    def test_precision(self):
        assert precision(Confusion(tp=10, fp=0, tn=0, fn=0)) == 100.0
        assert precision(Confusion(tp=5, fp=5, tn=0, fn=0)) == 50.0
        with pytest.raises(NoFlagged):
            precision(Confusion(tp=0, fp=0, tn=4, fn=1))

    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=40))
    def test_rates_match_formulas(self, pairs):
        flags = [f for f, _ in pairs]
        labels = [y for _, y in pairs]
        tp, fp, tn, fn = oracles.brute_confusion(flags, labels)
        c = confusion(flags, labels)
        assert c.n == len(pairs)
        cc = correct_classification(c)
        assert cc == (tp + tn) / len(pairs) * 100 and 0 <= cc <= 100
        if tp + fn:
            assert detection_rate(c) == tp / (tp + fn) * 100
        if tp + fp:
            assert precision(c) == tp / (tp + fp) * 100


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([5, 6, 1, 2, 3], [True, True, False, False, False]) == 100.0

    def test_all_ties(self):
        assert roc_auc([1.0] * 6, [True, False, True, False, False, False]) == 50.0

    def test_hand_enumeration(self):
        assert roc_auc([3, 1, 2, 2], [True, False, True, False]) == 87.5

    @pytest.mark.parametrize("labels", [[True, True], [False, False, False]])
    def test_one_class(self, labels):
        with pytest.raises(OneClassOnly):
            roc_auc(np.arange(len(labels)), labels)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            roc_auc([1.0, 2.0], [True, False, False])

    def test_brute_force_random_cases(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 13))
            labels = rng.random(n) < 0.4
            if labels.all() or not labels.any():
                labels[0] = not labels[0]
            scores = rng.integers(0, 4, size=n).astype(float)  # plenty of ties
            assert roc_auc(scores, labels) == oracles.brute_auc(scores, labels)

    @given(scored_labels())
    def test_matches_brute_force(self, case):
        scores, labels = case
        assert roc_auc(scores, labels) == oracles.brute_auc(scores, labels)

    @given(scored_labels(), st.sampled_from(["exp", "cube", "affine"]))
    def test_invariant_under_increasing_maps(self, case, kind):
        scores, labels = case
        mapped = {"exp": np.exp(scores), "cube": scores**3, "affine": 3.0 * scores + 7.0}[kind]
        assert roc_auc(mapped, labels) == roc_auc(scores, labels)

    @given(scored_labels(distinct=True))
    def test_negation_complements(self, case):
        scores, labels = case
        assert roc_auc(-scores, labels) == pytest.approx(100.0 - roc_auc(scores, labels), abs=1e-12)


class TestEvaluate:
    def test_undefined_become_none(self):
        ev = evaluate([False, False], [0.1, 0.2], [False, False])
        assert ev.cc == 100.0
        assert (ev.dr, ev.prec, ev.auc) == (None, None, None)

    def test_all_defined(self):
        ev = evaluate([True, False, False], [0.9, 0.1, 0.2], [True, False, False])
        assert (ev.cc, ev.dr, ev.prec, ev.auc) == (100.0, 100.0, 100.0, 100.0)
        assert ev.confusion == Confusion(1, 0, 2, 0)
