"""
Tests for file formats and model persistence.
"""

import json

import pytest

from app.models.bayes import ActivityModel
from app.models.markov import TransitionModel
from app.schemas.core import ActivityLabel, SensorCatalog
from app.schemas.reports import ConfusionMatrix, CurvePoint, SweepRow
from app.services.evaluation import metrics
from app.services.markov import score_session_markov
from app.storage.files import (
    COMPARISON_HEADER,
    atomic_write_text,
    read_frames_csv,
    read_frames_dir,
    read_raw_trace,
    write_curve_csv,
    write_frames_csv,
    write_metrics_csv,
    write_pr_csv,
)
from app.storage.model_store import load_model, read_model_file, save_model
from app.utils.exceptions import (
    EmptyTraceException,
    FileFormatException,
    InsufficientDataException,
    ModelFormatException,
)
from tests.conftest import make_session

FRAMES_HEADER = "second,acc,gyro,light,prox,cam,mic,speaker,headset,gps_on,gps_move"


@pytest.fixture
def session():
    rows = [[0] * 10, [1, 0, 0, 0, 0, 0, 0, 0, 0, 1], [1, 1, 0, 0, 1, 0, 0, 0, 0, 0]]
    return make_session(rows, ActivityLabel.WALKING_HAND, "walk-1")


class TestFramesCsv:
    """Test cases for the frames CSV format."""

    def test_layout(self, session, tmp_path):
        path = tmp_path / "walk.csv"
        write_frames_csv(session, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# label=WalkingHand session_id=walk-1"
        assert lines[1] == FRAMES_HEADER
        assert lines[3] == "1,1,0,0,0,0,0,0,0,0,1"
        assert len(lines) == 5

    def test_round_trip(self, session, tmp_path):
        path = tmp_path / "walk.csv"
        write_frames_csv(session, path)
        loaded = read_frames_csv(path)
        assert loaded == session

    def test_header_drift(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# label=Sleeping session_id=x\nsecond,acc\n0,1\n")
        with pytest.raises(FileFormatException):
            read_frames_csv(path)

    def test_non_binary_bits(self, session, tmp_path):
        path = tmp_path / "walk.csv"
        write_frames_csv(session, path)
        path.write_text(path.read_text().replace("\n2,1,1,0,0,1,", "\n2,1,1,0,0,2,"))
        with pytest.raises(FileFormatException):
            read_frames_csv(path)

    def test_second_gap(self, session, tmp_path):
        path = tmp_path / "walk.csv"
        write_frames_csv(session, path)
        text = path.read_text().replace("\n2,", "\n5,")
        path.write_text(text)
        with pytest.raises(FileFormatException):
            read_frames_csv(path)

    def test_missing_metadata(self, tmp_path):
        path = tmp_path / "bare.csv"
        path.write_text(FRAMES_HEADER + "\n0,0,0,0,0,0,0,0,0,0,0\n")
        with pytest.raises(FileFormatException):
            read_frames_csv(path)

    def test_unknown_label(self, tmp_path):
        path = tmp_path / "odd.csv"
        path.write_text("# label=Skydiving session_id=x\n" + FRAMES_HEADER + "\n0,0,0,0,0,0,0,0,0,0,0\n")
        with pytest.raises(FileFormatException):
            read_frames_csv(path)

    def test_directory(self, session, tmp_path):
        write_frames_csv(session, tmp_path / "b.csv")
        write_frames_csv(session.model_copy(update={"id": "walk-0"}), tmp_path / "a.csv")
        assert [s.id for s in read_frames_dir(tmp_path)] == ["walk-0", "walk-1"]

    def test_empty_directory(self, tmp_path):
        with pytest.raises(InsufficientDataException):
            read_frames_dir(tmp_path)


class TestRawTrace:
    """Test cases for raw trace reading."""

    def test_sorted_by_timestamp(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("timestamp_ms,channel,value\n1500,light,3\n0,light,1\n")
        table = read_raw_trace(path)
        assert table["timestamp_ms"].tolist() == [0, 1500]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("")
        with pytest.raises(EmptyTraceException):
            read_raw_trace(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("timestamp_ms,channel,value\n")
        with pytest.raises(EmptyTraceException):
            read_raw_trace(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("time,sensor,reading\n0,light,1\n")
        with pytest.raises(FileFormatException):
            read_raw_trace(path)


class TestReportCsv:
    """Test cases for metrics and curve CSVs."""

    def test_metrics_header_and_undefined(self, tmp_path):
        report = metrics(ConfusionMatrix(tp=2, fn=0))
        path = tmp_path / "metrics.csv"
        write_metrics_csv([SweepRow(threshold=3, report=report)], path)
        lines = path.read_text().splitlines()
        assert lines[0] == "threshold,recall,fnr,specificity,fpr,accuracy,fscore,std_precision"
        assert lines[1] == "3,1.000000,0.000000,undefined,undefined,1.000000,undefined,1.000000"

    def test_curve_header(self, tmp_path):
        path = tmp_path / "roc.csv"
        write_curve_csv([CurvePoint(threshold=0.6, x=0.25, y=1.0)], path)
        assert path.read_text() == "threshold,fpr,tpr\n0.6,0.250000,1.000000\n"

    def test_pr_header(self, tmp_path):
        path = tmp_path / "pr.csv"
        write_pr_csv([CurvePoint(threshold=0.6, x=0.5, y=0.8)], path)
        assert path.read_text() == "threshold,recall,precision\n0.6,0.500000,0.800000\n"

    def test_comparison_header(self):
        assert ",".join(COMPARISON_HEADER) == (
            "detector,threshold,recall,fnr,specificity,fpr,accuracy,fscore,std_precision,auprc"
        )

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        path = tmp_path / "out" / "file.txt"
        atomic_write_text(path, "one\n")
        atomic_write_text(path, "two\n")
        assert path.read_text() == "two\n"
        assert [p.name for p in path.parent.iterdir()] == ["file.txt"]


class TestModelStore:
    """Test cases for model persistence."""

    def test_markov_round_trip(self, tmp_path, markov_model, test_corpus):
        path = tmp_path / "markov.json"
        save_model(markov_model, path)
        loaded = load_model(path)
        assert isinstance(loaded, TransitionModel)
        assert loaded.counts == markov_model.counts
        assert loaded.initial_distribution == markov_model.initial_distribution
        for s in test_corpus:
            assert score_session_markov(loaded, s, 3) == score_session_markov(markov_model, s, 3)

    def test_bayes_round_trip(self, tmp_path, bayes_model):
        path = tmp_path / "bayes.json"
        save_model(bayes_model, path)
        loaded = load_model(path)
        assert isinstance(loaded, ActivityModel)
        assert loaded.activities == bayes_model.activities
        assert (loaded.theta == bayes_model.theta).all()
        assert loaded.smoothing_alpha == bayes_model.smoothing_alpha

    def test_catalog_is_stored(self, tmp_path, markov_model):
        path = tmp_path / "markov.json"
        save_model(markov_model, path)
        document = read_model_file(path)
        assert document.kind == "markov"
        assert [c.column for c in document.catalog] == SensorCatalog.default().columns

    def test_unknown_format_version(self, tmp_path, markov_model):
        path = tmp_path / "markov.json"
        save_model(markov_model, path)
        raw = json.loads(path.read_text())
        raw["format_version"] = 99
        path.write_text(json.dumps(raw))
        with pytest.raises(ModelFormatException):
            load_model(path)

    def test_tampered_counts(self, tmp_path):
        model = TransitionModel(2, {(0, 1): 2, (1, 0): 1}, {0: 1.0})
        path = tmp_path / "markov.json"
        save_model(model, path, SensorCatalog(channels=SensorCatalog.default().channels[:2]))
        raw = json.loads(path.read_text())
        raw["payload"]["row_totals"] = [[0, 5], [1, 1]]
        path.write_text(json.dumps(raw))
        with pytest.raises(ModelFormatException):
            load_model(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("not json")
        with pytest.raises(ModelFormatException):
            load_model(path)
