import json

import pytest
from click.testing import CliRunner

from main import cli
from pap.anno import parse_dataset, parse_predictions
from pap.images import read_png
from pap.types import PartGroup


@pytest.fixture
def runner():
    return CliRunner()


def _generate(runner, out_dir, *extra, seed="1"):
    result = runner.invoke(cli, ["--seed", seed, "gen-synthetic", "--out", str(out_dir), "--n-videos", "3",
                                 "--frames-per-video", "4", "--no-crops", *extra])
    assert result.exit_code == 0, result.output
    return out_dir / "annotations.json"


@pytest.fixture
def dataset(runner, tmp_path):
    return _generate(runner, tmp_path / "data", "--pred-out", str(tmp_path / "data" / "gt-as-pred.json"))


@pytest.fixture
def gt_as_pred(dataset):
    """Zero-error predictions: the ground truth in prediction form."""
    return dataset.parent / "gt-as-pred.json"


# ===== DATASET =====

def test_validate_ok(runner, dataset, gt_as_pred):
    result = runner.invoke(cli, ["validate", "--anno", str(dataset), "--pred", str(gt_as_pred)])
    assert result.exit_code == 0
    assert "annotations OK: 3 videos, 12 frames" in result.output
    assert "predictions OK: 3 videos" in result.output


def test_validate_reports_path(runner, dataset, tmp_path):
    doc = json.loads(dataset.read_text(encoding="utf-8"))
    doc["videos"][0]["frames"][0]["persons"][0]["box"] = [10, 10, 5, 20]
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc), encoding="utf-8")
    result = runner.invoke(cli, ["validate", "--anno", str(broken)])
    assert result.exit_code == 1
    assert "/videos/0/frames/0/persons/0" in result.output


def test_unknown_subcommand_is_usage_error(runner):
    assert runner.invoke(cli, ["frobnicate"]).exit_code == 2


def test_missing_required_option_is_usage_error(runner):
    assert runner.invoke(cli, ["score", "--gt", "nowhere.json"]).exit_code == 2


def test_gen_synthetic_is_reproducible(runner, tmp_path):
    first = _generate(runner, tmp_path / "a").read_bytes()
    assert _generate(runner, tmp_path / "b").read_bytes() == first
    assert _generate(runner, tmp_path / "c", seed="2").read_bytes() != first


def test_gen_synthetic_jobs_do_not_change_output(runner, tmp_path):
    sequential = _generate(runner, tmp_path / "a").read_bytes()
    result = runner.invoke(cli, ["--seed", "1", "--jobs", "4", "gen-synthetic", "--out", str(tmp_path / "b"),
                                 "--n-videos", "3", "--frames-per-video", "4", "--no-crops"])
    assert result.exit_code == 0
    assert (tmp_path / "b" / "annotations.json").read_bytes() == sequential


def test_gen_synthetic_writes_predictions(runner, tmp_path):
    anno_path = _generate(runner, tmp_path / "d", "--pred-out", str(tmp_path / "pred.json"), "--action-flip", "1")
    vocab, videos = parse_dataset(anno_path)
    predictions = parse_predictions(tmp_path / "pred.json", vocab)
    assert all(p.action != v.action for v, p in zip(videos, predictions.videos))


def test_invalid_skew_exits_one(runner, tmp_path):
    result = runner.invoke(cli, ["gen-synthetic", "--out", str(tmp_path / "x"), "--state-skew", "0.0001"])
    assert result.exit_code == 1
    assert "state_skew" in result.output


# ===== SEGMENTS =====

def test_make_segments(runner, dataset, tmp_path):
    out = tmp_path / "segments.json"
    result = runner.invoke(cli, ["make-segments", "--anno", str(dataset), "--duration", "3", "--out", str(out)])
    assert result.exit_code == 0
    records = json.loads(out.read_text(encoding="utf-8"))
    # 4 frames at 1 fps: segments [0, 3) and [3, 4) per video
    assert len(records) == 3 * 2 * 6
    assert [r["group"] for r in records[:6]] == [g.value for g in PartGroup]
    assert records[0]["composite"].startswith("(")


# ===== POSE =====

def test_render_pose(runner, tmp_path):
    result = runner.invoke(cli, ["--seed", "3", "gen-synthetic", "--out", str(tmp_path / "data"),
                                 "--n-videos", "1", "--frames-per-video", "1", "--persons-max", "2",
                                 "--image-width", "120", "--image-height", "80"])
    assert result.exit_code == 0, result.output
    crops = tmp_path / "data" / "crops"
    result = runner.invoke(cli, ["render-pose", "--crops", str(crops), "--out", str(tmp_path / "embedded")])
    assert result.exit_code == 0, result.output
    manifest = json.loads((crops / "manifest.json").read_text(encoding="utf-8"))
    for entry in manifest["crops"]:
        before = read_png(crops / entry["file"])
        after = read_png(tmp_path / "embedded" / entry["file"])
        assert (after.width, after.height) == (before.width, before.height)
        assert (after.pixels >= before.pixels).all()


def test_refine_boxes_grows_boxes(runner, dataset, gt_as_pred, tmp_path):
    pred = gt_as_pred
    out = tmp_path / "refined.json"
    result = runner.invoke(cli, ["refine-boxes", "--pred", str(pred), "--out", str(out), "--margin", "1"])
    assert result.exit_code == 0, result.output
    vocab = parse_dataset(dataset)[0]
    before = parse_predictions(pred, vocab).videos[0].frames[0].persons[0].box
    after = parse_predictions(out, vocab).videos[0].frames[0].persons[0].box
    assert after.area >= before.area


def test_refine_boxes_bad_image_size(runner, gt_as_pred):
    result = runner.invoke(cli, ["refine-boxes", "--pred", str(gt_as_pred), "--image-size", "wide"])
    assert result.exit_code == 2


# ===== BASELINES AND SCORING =====

def _baseline(runner, dataset, out, *mode):
    result = runner.invoke(cli, ["baseline-predict", "--train", str(dataset), "--test", str(dataset),
                                 "--out", str(out), *mode])
    assert result.exit_code == 0, result.output
    return out


@pytest.mark.parametrize("mode", [["--mode", "modal"], ["--mode", "constant:none"], ["--mode", "segment"]])
def test_baseline_modes_produce_scorable_predictions(runner, dataset, tmp_path, mode):
    pred = _baseline(runner, dataset, tmp_path / "pred.json", *mode)
    result = runner.invoke(cli, ["score", "--gt", str(dataset), "--pred", str(pred), "--format", "json"])
    assert result.exit_code == 0
    summary = json.loads(result.output)
    assert summary["video_accuracy"] == 1.0
    assert 0.0 <= summary["mean_psc"] <= 1.0


def test_baseline_unknown_mode(runner, dataset, tmp_path):
    result = runner.invoke(cli, ["baseline-predict", "--test", str(dataset), "--mode", "median"])
    assert result.exit_code == 2


def test_baseline_unknown_state(runner, dataset):
    result = runner.invoke(cli, ["baseline-predict", "--test", str(dataset), "--mode", "constant:juggle"])
    assert result.exit_code == 1


def test_self_prediction_scores_perfectly(runner, dataset, gt_as_pred):
    result = runner.invoke(cli, ["score", "--gt", str(dataset), "--pred", str(gt_as_pred)])
    assert result.exit_code == 0, result.output
    assert "ROC score: 100.00" in result.output
    assert "mean PSC: 100.00" in result.output


def test_score_report_independent_of_jobs(runner, tmp_path):
    pred = tmp_path / "pred.json"
    _generate(runner, tmp_path / "d", "--pred-out", str(pred), "--state-flip", "0.3", "--box-jitter", "0.1")
    reports = []
    for jobs in ("1", "8"):
        report = tmp_path / f"report{jobs}.csv"
        result = runner.invoke(cli, ["--jobs", jobs, "score", "--gt", str(tmp_path / "d" / "annotations.json"),
                                     "--pred", str(pred), "--report", str(report)])
        assert result.exit_code == 0, result.output
        reports.append(report.read_bytes())
    assert reports[0] == reports[1]
    assert reports[0].startswith(b"video_id,psc,video_correct\n")


def test_score_det_perfect(runner, dataset, gt_as_pred):
    result = runner.invoke(cli, ["score-det", "--gt", str(dataset), "--pred", str(gt_as_pred), "--format", "json"])
    assert result.exit_code == 0
    rows = json.loads(result.output)
    assert rows[0]["category"] == "person"
    assert all(r["ap50"] == pytest.approx(1.0) for r in rows if r["n_gt"])


def test_cost(runner, tmp_path):
    result = runner.invoke(cli, ["cost", "--duration", "9"])
    assert result.exit_code == 0
    assert "frame mode: 6.30 TFLOPs" in result.output
    assert "reduction: 66.67%" in result.output
    out = tmp_path / "cost.json"
    assert runner.invoke(cli, ["cost", "--duration", "10", "--out", str(out)]).exit_code == 0
    assert json.loads(out.read_text(encoding="utf-8"))["reduction"] == pytest.approx(0.6)


# ===== CONFIG FILE =====

def test_config_file_supplies_defaults(runner, tmp_path):
    cfg = tmp_path / "pap.toml"
    cfg.write_text('seed = 5\n\n[gen-synthetic]\nn_videos = 2\nframes-per-video = 3\ncrops = false\n',
                   encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(cfg), "gen-synthetic", "--out", str(tmp_path / "a")])
    assert result.exit_code == 0, result.output
    assert "wrote 2 videos" in result.output
    explicit = runner.invoke(cli, ["--seed", "5", "gen-synthetic", "--out", str(tmp_path / "b"),
                                   "--n-videos", "2", "--frames-per-video", "3", "--no-crops"])
    assert explicit.exit_code == 0
    assert (tmp_path / "a" / "annotations.json").read_bytes() == (tmp_path / "b" / "annotations.json").read_bytes()


def test_flags_override_config_file(runner, tmp_path):
    cfg = tmp_path / "pap.toml"
    cfg.write_text('seed = 5\n\n[gen-synthetic]\nn_videos = 2\ncrops = false\n', encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(cfg), "--seed", "6", "gen-synthetic", "--out", str(tmp_path / "a"),
                                 "--n-videos", "1", "--frames-per-video", "4"])
    assert result.exit_code == 0, result.output
    assert "wrote 1 videos" in result.output
    explicit = _generate(runner, tmp_path / "b", seed="6")
    assert parse_dataset(tmp_path / "a" / "annotations.json")[1][0] == parse_dataset(explicit)[1][0]


def test_broken_config_file(runner, tmp_path):
    cfg = tmp_path / "pap.toml"
    cfg.write_text("seed = [", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(cfg), "cost", "--duration", "3"])
    assert result.exit_code == 1
