import dataclasses

import numpy as np
import pytest

from config import DataConfig
from dataset import drop_flagged, find_anomalies, load_csv, select_features, split, summarize, write_csv
from dataset.features import split_indices, take
from dataset.loader import IN_TO_CM, LB_TO_KG
from dataset.rng import STREAM_INIT, STREAM_SPLIT, DeterministicStream, validate_seed
from errors import ArtifactIOError, ConfigurationError, DomainError, ParseError
from models.records import AnthropometricRecord
from tests.conftest import make_records

HEADER = ",".join(DataConfig.SCHEMA)
ROW = "1,1.0708,12.3,23,154.25,67.75,36.2,93.1,85.2,94.5,59.0,37.3,21.9,32.0,27.4,17.1"


def _write(tmp_path, *lines: str):
    path = tmp_path / "data.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ----------------------------------------------------------------------
# load_csv / write_csv
# ----------------------------------------------------------------------

class TestLoadCsv:
    def test_imperial_conversion(self, tmp_path):
        (record,) = load_csv(_write(tmp_path, HEADER, ROW), units="imperial")
        assert record.case_id == 1
        assert record.weight == pytest.approx(154.25 * LB_TO_KG)
        assert record.height == pytest.approx(67.75 * IN_TO_CM)
        assert record.abdomen == 85.2  # circumferences are already cm

    def test_metric_keeps_values(self, tmp_path):
        (record,) = load_csv(_write(tmp_path, HEADER, ROW.replace("154.25,67.75", "70.0,172.1")))
        assert record.weight == 70.0
        assert record.height == 172.1

    def test_header_only_is_empty(self, tmp_path):
        assert load_csv(_write(tmp_path, HEADER)) == []

    def test_non_numeric_cell_located(self, tmp_path):
        bad = ROW.replace("1,", "2,", 1).replace("154.25", "abc")
        with pytest.raises(ParseError) as exc:
            load_csv(_write(tmp_path, HEADER, ROW, bad), units="imperial")
        assert exc.value.row == 3
        assert exc.value.column == "weight"
        assert "row 3" in str(exc.value) and "weight" in str(exc.value)

    def test_missing_column(self, tmp_path):
        header = HEADER.replace(",wrist", "")
        row = ROW.rsplit(",", 1)[0]
        with pytest.raises(ParseError) as exc:
            load_csv(_write(tmp_path, header, row))
        assert exc.value.column == "wrist"

    def test_duplicate_case_id(self, tmp_path):
        with pytest.raises(ParseError, match="duplicate case_id 1"):
            load_csv(_write(tmp_path, HEADER, ROW, ROW), units="imperial")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ArtifactIOError):
            load_csv(tmp_path / "nope.csv")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ParseError, match="missing header"):
            load_csv(path)

    def test_unknown_units(self, tmp_path):
        with pytest.raises(ParseError):
            load_csv(_write(tmp_path, HEADER, ROW), units="furlongs")

    def test_anomalies_are_kept_and_flagged(self, tmp_path):
        odd = "2,1.0708,1.2,23,70.0,172.0,36.2,93.1,85.2,94.5,59.0,37.3,21.9,32.0,27.4,17.1"
        short = "3,1.0708,12.3,23,70.0,120.0,36.2,93.1,85.2,94.5,59.0,37.3,21.9,32.0,27.4,17.1"
        good = "1,1.0708,12.3,23,70.0,172.0,36.2,93.1,85.2,94.5,59.0,37.3,21.9,32.0,27.4,17.1"
        records = load_csv(_write(tmp_path, HEADER, good, odd, short))
        assert len(records) == 3
        assert records[0].flags == ()
        assert any("essential-fat" in f for f in records[1].flags)
        assert any("height" in f for f in records[2].flags)
        assert [r.case_id for r in drop_flagged(records)] == [1]
        assert all(w.startswith("case ") for w in find_anomalies(records))

    def test_dense_record_also_checked_against_siri(self, tmp_path):
        dense = "4,1.25,12.3,23,70.0,172.0,36.2,93.1,85.2,94.5,59.0,37.3,21.9,32.0,27.4,17.1"
        (record,) = load_csv(_write(tmp_path, HEADER, dense))
        assert any("density" in f for f in record.flags)
        assert any("Siri(density) = -54.0%" in f for f in record.flags)

    def test_round_trip(self, tmp_path, synthetic_records):
        for units in ("metric", "imperial"):
            path = write_csv(synthetic_records, tmp_path / f"{units}.csv", units=units)
            loaded = load_csv(path, units=units)
            assert len(loaded) == len(synthetic_records)
            for a, b in zip(loaded, synthetic_records):
                assert a.case_id == b.case_id
                for name, value in a.to_dict().items():
                    assert value == pytest.approx(getattr(b, name), rel=1e-9)
        assert AnthropometricRecord.from_dict(loaded[0].to_dict()) == loaded[0]


# ----------------------------------------------------------------------
# summarize
# ----------------------------------------------------------------------

class TestSummarize:
    def test_identical_records_have_zero_sd(self, synthetic_records):
        summary = summarize([synthetic_records[0], synthetic_records[0]])
        assert all(stats.sd == 0.0 for stats in summary.fields.values())

    def test_two_point_mean(self, synthetic_records):
        a = dataclasses.replace(synthetic_records[0], bodyfat=10.0)
        b = dataclasses.replace(synthetic_records[1], bodyfat=20.0)
        summary = summarize([a, b])
        assert summary.fields["bodyfat"].mean == 15.0
        assert summary.fields["bodyfat"].sd == pytest.approx(np.std([10.0, 20.0], ddof=1))

    @pytest.mark.parametrize("shift", [-7.5, 0.25, 40.0])
    def test_translation_moves_mean_only(self, synthetic_records, shift):
        base = summarize(synthetic_records)
        moved = summarize([
            dataclasses.replace(r, weight=r.weight + shift, abdomen=r.abdomen + shift)
            for r in synthetic_records
        ])
        for name in ("weight", "abdomen"):
            assert moved.fields[name].mean == pytest.approx(base.fields[name].mean + shift, rel=1e-12)
            assert moved.fields[name].sd == pytest.approx(base.fields[name].sd, rel=1e-9)
        assert moved.fields["height"] == base.fields["height"]

    def test_single_record(self, synthetic_records):
        summary = summarize(synthetic_records[:1])
        assert summary.n == 1
        assert summary.fields["weight"].sd == 0.0

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            summarize([])

    def test_to_dict_shape(self, synthetic_records):
        payload = summarize(synthetic_records).to_dict()
        assert payload["n"] == len(synthetic_records)
        assert set(payload["fields"]["abdomen"]) == {"mean", "sd"}


# ----------------------------------------------------------------------
# split
# ----------------------------------------------------------------------

class TestSplit:
    def test_floor_rule(self):
        ds = split_indices(253, 0.8, seed=0)
        assert len(ds.train_indices) == 202
        assert len(ds.test_indices) == 51

    def test_deterministic(self, synthetic_records):
        assert split(synthetic_records, 0.8, 11) == split(synthetic_records, 0.8, 11)

    def test_partition_over_many_seeds(self):
        n = 253
        shuffles = set()
        for seed in range(100):
            ds = split_indices(n, 0.8, seed)
            train, test = set(ds.train_indices), set(ds.test_indices)
            assert not train & test
            assert train | test == set(range(n))
            assert len(ds.train_indices) == 202
            shuffles.add(ds.train_indices)
        assert len(shuffles) == 100

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.1, 1.5])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ConfigurationError):
            split_indices(10, ratio, 0)

    def test_too_few_records(self):
        with pytest.raises(DomainError):
            split_indices(1, 0.5, 0)
        with pytest.raises(DomainError):
            split_indices(3, 0.2, 0)

    def test_take_follows_indices(self, synthetic_records):
        ds = split(synthetic_records, 0.8, 5)
        test = take(synthetic_records, ds.test_indices)
        assert [r.case_id for r in test] == [synthetic_records[i].case_id for i in ds.test_indices]

    def test_to_dict(self):
        ds = split_indices(10, 0.8, 3)
        assert type(ds).from_dict(ds.to_dict()) == ds


class TestDeterministicStream:
    def test_streams_are_independent(self):
        assert DeterministicStream(5, STREAM_SPLIT).permutation(50) != DeterministicStream(5, STREAM_INIT).permutation(50)

    def test_repeatable(self):
        a = DeterministicStream(2**63 + 1, STREAM_SPLIT)
        b = DeterministicStream(2**63 + 1, STREAM_SPLIT)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]

    def test_uniform_range(self):
        u = DeterministicStream(0, STREAM_INIT).uniform(10_000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.02

    def test_bounded_range(self):
        stream = DeterministicStream(1, STREAM_SPLIT)
        draws = [stream.bounded(7) for _ in range(2000)]
        assert set(draws) == set(range(7))

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True, "3"])
    def test_invalid_seed(self, seed):
        with pytest.raises(ConfigurationError):
            validate_seed(seed)


# ----------------------------------------------------------------------
# select_features
# ----------------------------------------------------------------------

class TestSelectFeatures:
    def test_shape_and_order(self, synthetic_records):
        X, y = select_features(synthetic_records, ["abdomen", "weight"], "bodyfat")
        assert X.shape == (len(synthetic_records), 2)
        assert X[3, 0] == synthetic_records[3].abdomen
        assert X[3, 1] == synthetic_records[3].weight
        assert y[3] == synthetic_records[3].bodyfat

    def test_single_record(self, synthetic_records):
        X, y = select_features(synthetic_records[:1], ["abdomen"])
        assert X.shape == (1, 1)
        assert y.shape == (1,)

    def test_empty_feature_list(self, synthetic_records):
        with pytest.raises(ConfigurationError):
            select_features(synthetic_records, [], "bodyfat")

    def test_unknown_name_lists_valid_names(self, synthetic_records):
        with pytest.raises(ConfigurationError, match="abdomen"):
            select_features(synthetic_records, ["waistline"], "bodyfat")
        with pytest.raises(ConfigurationError):
            select_features(synthetic_records, ["abdomen"], "fatness")

    def test_derived_bmi(self):
        (record,) = make_records(n=1)
        X, _ = select_features([record], ["bmi"])
        assert X[0, 0] == pytest.approx(record.weight / (record.height / 100.0) ** 2)
