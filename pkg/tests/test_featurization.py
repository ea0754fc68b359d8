import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wristmood.core import (
    BinaryMood,
    EmotionLabel,
    Gender,
    ParticipantMeta,
    SelfAssessment,
    SensorSample,
    SessionRecording,
)
from wristmood.errors import DomainError, InsufficientDataError, SpecError
from wristmood.featurization import (
    FeatureMatrix,
    FeatureSetSpec,
    build_matrix,
    build_nonstatistical_rows,
    build_statistical_row,
    channel_stats,
    compute_hrv,
    detect_peaks,
    fit_pca,
    nn_intervals,
    select_features,
    statistical_column_names,
)

from oracles import brute_hrv


def make_session(samples, gender=Gender.MALE, age=25, emotion=EmotionLabel.JOY,
                 sid="s"):
    return SessionRecording(
        meta=ParticipantMeta(session_id=sid, age=age, gender=gender),
        samples=tuple(samples),
        assessment=SelfAssessment(7, 5, emotion),
    )


def hr_session(bpms, **kw):
    samples = [
        SensorSample(t_ms=i * 1000, hr_bpm=b, acc=(0.1 * i, -0.1, 9.8),
                     gyro=(0.0, 0.01 * i, 0.0))
        for i, b in enumerate(bpms)
    ]
    return make_session(samples, **kw)


class TestDetectPeaks:
    def test_single_interior_max(self):
        assert detect_peaks([1, 3, 1]) == [1]

    def test_monotone_has_none(self):
        assert detect_peaks([1, 2, 3]) == []

    def test_plateau_excluded(self):
        assert detect_peaks([0, 2, 2, 0, 5, 0]) == [4]

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            detect_peaks([])


class TestNnIntervals:
    def test_single_beat(self):
        assert nn_intervals([60.0]) == [1000.0]

    def test_two_rates(self):
        assert nn_intervals([60.0, 120.0]) == [1000.0, 500.0]

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            nn_intervals([60.0, 0.0])

    @given(st.lists(st.floats(min_value=1.0, max_value=250.0), min_size=1,
                    max_size=100))
    def test_outputs_positive_finite(self, bpm):
        out = nn_intervals(bpm)
        assert all(v > 0 and np.isfinite(v) for v in out)


class TestComputeHrv:
    def test_constant_series(self):
        m = compute_hrv([60.0] * 4)
        assert (m.sdnn, m.rmssd, m.nn50, m.pnn50, m.hr_range) == (0, 0, 0, 0, 0)

    def test_hand_values(self):
        m = compute_hrv([60.0, 120.0])
        assert m.sdnn == 250.0
        assert m.rmssd == 500.0
        assert m.nn50 == 1
        assert m.pnn50 == 100.0
        assert m.hr_range == 60.0

    def test_too_few_readings(self):
        with pytest.raises(InsufficientDataError):
            compute_hrv([60.0])

    def test_degenerate_cleaning_flagged(self):
        # 250+ bpm -> every NN interval below the plausibility window
        m = compute_hrv([250.0, 260.0])
        assert m.sdnn == 0.0
        assert m.sdnn_degenerate

    def test_matches_oracle_on_random_series(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(2, 60))
            bpm = rng.uniform(25.0, 220.0, size=n).tolist()
            m = compute_hrv(bpm)
            sdnn, rmssd, nn50, pnn50, hr_range = brute_hrv(bpm)
            assert m.sdnn == pytest.approx(sdnn, rel=1e-9, abs=1e-12)
            assert m.rmssd == pytest.approx(rmssd, rel=1e-9, abs=1e-12)
            assert m.nn50 == nn50
            assert m.pnn50 == pytest.approx(pnn50, rel=1e-9)
            assert m.hr_range == pytest.approx(hr_range, rel=1e-9)


class TestChannelStats:
    def test_duplicate_majority(self):
        s = channel_stats([1.0, 1.0, 2.0])
        assert s.mode == 1.0
        assert s.mean == pytest.approx(4.0 / 3.0)
        assert s.median == 1.0

    def test_mode_tie_smallest(self):
        assert channel_stats([1.0, 2.0]).mode == 1.0

    def test_mode_rounding(self):
        assert channel_stats([1.004, 1.001, 2.0]).mode == 1.0

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1,
                    max_size=100))
    def test_order_invariants(self, xs):
        s = channel_stats(xs)
        assert s.min <= s.median <= s.max
        assert s.min <= s.mean <= s.max
        assert s.std >= 0
        assert s.peak_count <= (len(xs) - 1) // 2 if len(xs) > 1 else s.peak_count == 0


class TestStatisticalRow:
    def test_layout(self):
        names, row = build_statistical_row(hr_session([60.0, 70.0, 65.0]))
        # 7 channels x 7 stats + 5 HRV + age + 2-column gender one-hot
        assert len(names) == 7 * 7 + 5 + 1 + 2
        assert len(row) == len(names)
        assert names == statistical_column_names()
        assert all(np.isfinite(row))

    def test_constant_signal_zeros(self):
        samples = [SensorSample(t_ms=i * 1000, hr_bpm=70.0, acc=(0.0, 0.0, 9.8),
                                gyro=(0.0, 0.0, 0.0)) for i in range(10)]
        names, row = build_statistical_row(make_session(samples))
        values = dict(zip(names, row))
        for name, v in values.items():
            if name.endswith("_std") or name.endswith("_peaks") or name.startswith("hrv_"):
                assert v == 0.0, name

    def test_deterministic(self):
        r = hr_session([60.0, 72.0, 68.0, 75.0])
        assert build_statistical_row(r) == build_statistical_row(r)

    def test_gender_other_both_zero(self):
        names, row = build_statistical_row(
            hr_session([60.0, 70.0], gender=Gender.OTHER))
        values = dict(zip(names, row))
        assert values["gender_male"] == 0.0
        assert values["gender_female"] == 0.0

    def test_permutation_changes_only_order_stats(self):
        bpms = [60.0, 75.0, 62.0, 90.0, 71.0]
        names, row_a = build_statistical_row(hr_session(bpms))
        names, row_b = build_statistical_row(hr_session(bpms[::-1]))
        order_free = ("_mean", "_median", "_mode", "_min", "_max", "_std")
        for name, a, b in zip(names, row_a, row_b):
            if name.endswith(order_free) or name in ("age", "gender_male",
                                                     "gender_female",
                                                     "hrv_hr_range", "hrv_sdnn"):
                assert a == pytest.approx(b), name


class TestNonstatisticalRows:
    def test_per_instance_expansion(self):
        names, rows, gid = build_nonstatistical_rows(
            hr_session([60.0] * 15, sid="v1"))
        assert len(rows) == 15
        assert gid == "v1"
        assert len(names) == 7 + 1 + 2
        assert all(len(r) == len(names) for r in rows)

    def test_locf_mid_stream(self):
        samples = [
            SensorSample(0, 60.0, (0, 0, 9.8), (0, 0, 0)),
            SensorSample(1000, None, (0, 0, 9.8), (0, 0, 0)),
            SensorSample(2000, 80.0, (0, 0, 9.8), (0, 0, 0)),
        ]
        _, rows, _ = build_nonstatistical_rows(make_session(samples))
        assert [r[0] for r in rows] == [60.0, 60.0, 80.0]

    def test_concatenation_additive(self):
        a = hr_session([60.0] * 3, sid="a")
        b = hr_session([70.0] * 5, sid="b", emotion=EmotionLabel.FEAR)
        m = build_matrix([a, b], "nonstatistical")
        assert m.n_rows == 8
        assert m.labels[:3] == (BinaryMood.PLEASANT,) * 3
        assert m.labels[3:] == (BinaryMood.UNPLEASANT,) * 5


class TestSelectFeatures:
    @pytest.fixture()
    def matrix(self):
        sessions = [hr_session([60.0, 70.0, 65.0], sid="a"),
                    hr_session([80.0, 85.0, 75.0], sid="b",
                               emotion=EmotionLabel.ANGER)]
        return build_matrix(sessions, "statistical")

    def test_full_selection_is_identity(self, matrix):
        out = select_features(matrix, FeatureSetSpec())
        assert out.column_names == matrix.column_names

    def test_acc_gyro_without_gender(self, matrix):
        spec = FeatureSetSpec(groups=frozenset({"acc", "gyro"}),
                              without_gender=True)
        out = select_features(matrix, spec)
        assert len(out.column_names) == 2 * 7 * 3 + 1  # 42 motion stats + age

    def test_idempotent(self, matrix):
        spec = FeatureSetSpec(groups=frozenset({"hr"}), without_age=True)
        once = select_features(matrix, spec)
        twice = select_features(once, spec)
        assert twice.column_names == once.column_names

    def test_subsequence(self, matrix):
        spec = FeatureSetSpec(groups=frozenset({"hrv", "gyro"}),
                              without_median_mode=True)
        out = select_features(matrix, spec)
        it = iter(matrix.column_names)
        assert all(any(c == o for o in it) for c in out.column_names)

    def test_empty_resolution_rejected(self, matrix):
        nonstat = build_matrix(
            [hr_session([60.0, 61.0], sid="a"),
             hr_session([70.0, 71.0], sid="b", emotion=EmotionLabel.FEAR)],
            "nonstatistical")
        with pytest.raises(SpecError):
            select_features(nonstat, FeatureSetSpec(
                groups=frozenset({"hrv"}), without_age=True, without_gender=True))

    def test_unknown_group_rejected(self):
        with pytest.raises(SpecError):
            FeatureSetSpec(groups=frozenset({"bogus"}))


class TestPca:
    def test_rank1_preserves_distances(self):
        rng = np.random.default_rng(0)
        t = rng.normal(size=30)
        rows = np.outer(t, [1.0, 1.0, 1.0])
        m = FeatureMatrix(("a", "b", "c"), rows,
                          (BinaryMood.PLEASANT,) * 30, tuple("g%d" % i for i in range(30)))
        pca = fit_pca(m, 1)
        proj = pca.transform(m).rows[:, 0]
        orig = (rows - rows.mean(axis=0)) / rows.std(axis=0)
        for i in range(0, 30, 7):
            for j in range(1, 30, 5):
                d_orig = np.linalg.norm(orig[i] - orig[j])
                d_proj = abs(proj[i] - proj[j])
                assert d_proj == pytest.approx(d_orig, rel=1e-9, abs=1e-9)

    def test_components_orthonormal(self):
        rng = np.random.default_rng(1)
        rows = rng.normal(size=(50, 8))
        m = FeatureMatrix(tuple(f"c{i}" for i in range(8)), rows,
                          (BinaryMood.PLEASANT,) * 50,
                          tuple(f"g{i}" for i in range(50)))
        pca = fit_pca(m, 3)
        gram = pca.components @ pca.components.T
        assert np.allclose(gram, np.eye(3), atol=1e-9)

    def test_k_too_large(self):
        m = FeatureMatrix(("a",), np.zeros((3, 1)),
                          (BinaryMood.PLEASANT,) * 3, ("x", "y", "z"))
        with pytest.raises(SpecError):
            fit_pca(m, 2)
