import json

import pytest

from mahcm.cli import main
from mahcm.formats import load_manifest, read_assignment, read_stats


def run_cli(argv):
    try:
        main(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else exc.code
    return 0


def stats_without_seconds(path):
    rows = read_stats(path)
    return [(r.iteration, r.n_subsets, r.max_occupancy, r.min_occupancy,
             r.n_medoids, r.k_estimate, r.fmeasure) for r in rows]


@pytest.fixture(scope="module")
def dataset_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "segments.jsonl"
    code = run_cli([
        "gen", "--classes", "5", "--members", "14", "--dim", "2",
        "--min-len", "5", "--max-len", "9", "--jitter", "0.25",
        "--warp", "0.1", "--seed", "3", "--out", str(path),
    ])
    assert code == 0
    return path


class TestGen:
    def test_total_and_skew(self, tmp_path):
        path = tmp_path / "skewed.jsonl"
        code = run_cli([
            "gen", "--classes", "8", "--total", "200", "--skew", "5",
            "--min-len", "3", "--max-len", "5", "--out", str(path),
        ])
        assert code == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 200
        counts = {}
        for line in lines:
            rec = json.loads(line)
            counts[rec["label"]] = counts.get(rec["label"], 0) + 1
        assert len(counts) == 8
        assert max(counts.values()) > 3 * min(counts.values())


class TestRun:
    def test_mahc_m_outputs(self, dataset_file, tmp_path):
        out = tmp_path / "out"
        code = run_cli([
            "run", "--mode", "mahc-m", "--input", str(dataset_file),
            "--out-dir", str(out), "--p0", "3", "--beta", "30",
            "--max-iters", "3", "--seed", "1",
        ])
        assert code == 0
        assignment = read_assignment(out / "assignment.csv")
        assert len(assignment) == 70
        rows = read_stats(out / "stats.csv")
        assert rows[0].max_occupancy == 24  # ceil(70 / 3)
        assert all(r.max_occupancy <= 30 for r in rows[1:])
        assert all(r.fmeasure is not None for r in rows)
        manifest = load_manifest(out / "manifest.json")
        assert manifest["mode"] == "mahc-m"
        assert manifest["beta"] == 30

    def test_beta_defaults_to_even_share(self, dataset_file, tmp_path):
        out = tmp_path / "out"
        code = run_cli([
            "run", "--mode", "mahc", "--input", str(dataset_file),
            "--out-dir", str(out), "--p0", "4", "--max-iters", "2",
        ])
        assert code == 0
        assert load_manifest(out / "manifest.json")["beta"] == 18  # ceil(70/4)

    def test_baseline_mode(self, dataset_file, tmp_path):
        out = tmp_path / "base"
        code = run_cli([
            "run", "--mode", "ahc-baseline", "--input", str(dataset_file),
            "--out-dir", str(out),
        ])
        assert code == 0
        rows = read_stats(out / "stats.csv")
        assert len(rows) == 1
        assert rows[0].max_occupancy == 70
        assert rows[0].fmeasure is not None

    def test_manifest_rerun_reproduces_outputs(self, dataset_file, tmp_path):
        first = tmp_path / "first"
        code = run_cli([
            "run", "--mode", "mahc-m", "--input", str(dataset_file),
            "--out-dir", str(first), "--p0", "3", "--beta", "25",
            "--max-iters", "3", "--seed", "9",
        ])
        assert code == 0
        second = tmp_path / "second"
        code = run_cli([
            "run", "--manifest", str(first / "manifest.json"),
            "--out-dir", str(second),
        ])
        assert code == 0
        assert (first / "assignment.csv").read_bytes() == (second / "assignment.csv").read_bytes()
        assert stats_without_seconds(first / "stats.csv") == stats_without_seconds(second / "stats.csv")

    def test_missing_input_is_usage_error(self, tmp_path):
        assert run_cli(["run", "--out-dir", str(tmp_path / "x")]) == 1

    def test_unknown_flag_is_usage_error(self, tmp_path):
        assert run_cli(["run", "--nope", "1"]) == 1

    def test_malformed_input_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": 0, "frames": [[1.0], [2.0, 3.0]]}\n')
        code = run_cli([
            "run", "--input", str(bad), "--out-dir", str(tmp_path / "out"),
        ])
        assert code == 2


class TestEval:
    def test_scores_assignment(self, dataset_file, tmp_path):
        out = tmp_path / "out"
        assert run_cli([
            "run", "--mode", "mahc-m", "--input", str(dataset_file),
            "--out-dir", str(out), "--p0", "2", "--beta", "40",
            "--max-iters", "2", "--seed", "2",
        ]) == 0
        assert run_cli([
            "eval", "--input", str(dataset_file),
            "--assignment", str(out / "assignment.csv"),
        ]) == 0

    def test_incomplete_assignment_is_data_error(self, dataset_file, tmp_path):
        partial = tmp_path / "partial.csv"
        partial.write_text("segment_id,cluster_id\n0,0\n")
        code = run_cli([
            "eval", "--input", str(dataset_file), "--assignment", str(partial),
        ])
        assert code == 2

    def test_unlabeled_dataset_is_data_error(self, tmp_path):
        data = tmp_path / "plain.jsonl"
        data.write_text('{"id": 0, "frames": [[1.0]]}\n{"id": 1, "frames": [[2.0]]}\n')
        assignment = tmp_path / "a.csv"
        assignment.write_text("segment_id,cluster_id\n0,0\n1,1\n")
        assert run_cli([
            "eval", "--input", str(data), "--assignment", str(assignment),
        ]) == 2
