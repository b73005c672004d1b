"""End-to-end command-line behavior: config layering, commands, error paths."""

from __future__ import annotations

import pathlib

import pytest

from offlang.cli import main
from offlang.config import (
    RunConfig,
    apply_pairs,
    load_preset,
    parse_config_text,
    resolve_config,
)
from offlang.errors import OfflangError

from helpers import olid_row, separable_task_c_rows, write_olid


def invoke(capsys, *argv: str) -> tuple[int, str, str]:
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture()
def corpus_c(tmp_path):
    train = tmp_path / "train.tsv"
    test = tmp_path / "test.tsv"
    write_olid(train, separable_task_c_rows(20, seed=1))
    write_olid(test, separable_task_c_rows(10, seed=2, start_id=5000))
    return train, test


TRAIN_FLAGS = ("--task", "C", "--n_min", "2", "--n_max", "4", "--k", "200",
               "--max_epochs", "500")


class TestConfigFiles:
    def test_comments_and_blank_lines_skipped(self):
        pairs = parse_config_text("# header\n\ntask = C  # inline\n\nk = 3\n")
        assert pairs == {"task": "C", "k": "3"}

    def test_duplicate_key_reports_both_lines(self):
        with pytest.raises(OfflangError, match=r"line 3: duplicate key 'k'.*line 1"):
            parse_config_text("k = 1\ntask = A\nk = 2\n")

    def test_line_without_equals_rejected(self):
        with pytest.raises(OfflangError, match="line 2: expected 'key = value'"):
            parse_config_text("task = A\njust words\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(OfflangError, match="unknown config key 'bogus'"):
            apply_pairs(RunConfig(), {"bogus": "1"})

    def test_boolean_coercion_accepts_common_spellings(self):
        for raw, expected in [("true", True), ("YES", True), ("0", False), ("off", False)]:
            assert apply_pairs(RunConfig(), {"use_emoji": raw}).use_emoji is expected

    def test_bad_boolean_names_the_key(self):
        with pytest.raises(OfflangError, match="config key 'use_emoji'"):
            apply_pairs(RunConfig(), {"use_emoji": "maybe"})

    def test_bad_int_names_the_key(self):
        with pytest.raises(OfflangError, match="config key 'k': expected int"):
            apply_pairs(RunConfig(), {"k": "lots"})

    def test_validation_names_the_key(self):
        with pytest.raises(OfflangError, match="config key 'C'"):
            apply_pairs(RunConfig(), {"C": "-1"})
        with pytest.raises(OfflangError, match="'n_min'/'n_max'"):
            apply_pairs(RunConfig(), {"n_min": "5", "n_max": "3"})

    def test_preset_official_c(self):
        pairs = load_preset("official-c")
        assert pairs["task"] == "C"
        assert pairs["k"] == "1000"
        assert pairs["C"] == "0.1"

    def test_preset_suffix_optional(self):
        assert load_preset("official-b.cfg")["task"] == "B"

    def test_unknown_preset_lists_the_choices(self):
        with pytest.raises(OfflangError, match="official-a-svm, official-b, official-c"):
            load_preset("official-z")

    def test_disk_file_wins_over_preset_name(self, tmp_path):
        path = tmp_path / "official-c"
        path.write_text("task = B\n", encoding="utf-8")
        assert resolve_config(str(path)) == {"task": "B"}
        assert resolve_config("official-c")["task"] == "C"

    def test_missing_config_file_rejected(self):
        with pytest.raises(OfflangError, match="not a shipped preset"):
            resolve_config("/nonexistent/run.cfg")


class TestTrainPredictEvaluate:
    def test_full_pipeline_on_separable_corpus(self, tmp_path, corpus_c, capsys):
        train, test = corpus_c
        model = tmp_path / "c.model"
        preds = tmp_path / "c.csv"

        rc, out, _ = invoke(
            capsys, "train", "--train", str(train), "--model", str(model), *TRAIN_FLAGS
        )
        assert rc == 0
        assert "wrote model" in out
        assert model.exists()
        assert pathlib.Path(str(model) + ".space").exists()

        rc, out, _ = invoke(
            capsys, "predict", "--input", str(test), "--model", str(model),
            "--predictions", str(preds),
        )
        assert rc == 0
        assert "30 rows" in out

        rc, out, _ = invoke(
            capsys, "evaluate", "--eval", str(test), "--predictions", str(preds),
            "--task", "C",
        )
        assert rc == 0
        assert "macro_f1   1.0000" in out
        assert "accuracy   1.0000" in out

    def test_prediction_rows_follow_input_order(self, tmp_path, corpus_c, capsys):
        train, test = corpus_c
        model = tmp_path / "m"
        preds = tmp_path / "p.csv"
        invoke(capsys, "train", "--train", str(train), "--model", str(model), *TRAIN_FLAGS)
        rc, _, _ = invoke(
            capsys, "predict", "--input", str(test), "--model", str(model),
            "--predictions", str(preds),
        )
        assert rc == 0
        got_ids = [line.split(",")[0] for line in preds.read_text().splitlines()]
        expected_ids = [str(5000 + i) for i in range(30)]
        assert got_ids == expected_ids

    def test_preset_plus_flag_overrides(self, tmp_path, corpus_c, capsys):
        train, _ = corpus_c
        model = tmp_path / "m"
        rc, out, _ = invoke(
            capsys, "train", "--config", "official-c", "--train", str(train),
            "--model", str(model), "--k", "30", "--n_max", "4", "--max_epochs", "500",
        )
        assert rc == 0
        assert "(30 n-gram slots" in out

    def test_later_config_file_wins(self, tmp_path, corpus_c, capsys):
        train, _ = corpus_c
        first = tmp_path / "first.cfg"
        second = tmp_path / "second.cfg"
        first.write_text("task = C\nk = 100\nn_max = 4\nmax_epochs = 500\n")
        second.write_text("k = 40\n")
        model = tmp_path / "m"
        rc, out, _ = invoke(
            capsys, "train", "--config", str(first), "--config", str(second),
            "--train", str(train), "--model", str(model),
        )
        assert rc == 0
        assert "(40 n-gram slots" in out

    def test_reruns_are_byte_identical(self, tmp_path, corpus_c, capsys):
        train, test = corpus_c
        artifacts = []
        for tag in ("one", "two"):
            model = tmp_path / f"{tag}.model"
            preds = tmp_path / f"{tag}.csv"
            invoke(capsys, "train", "--train", str(train), "--model", str(model),
                   *TRAIN_FLAGS)
            invoke(capsys, "predict", "--input", str(test), "--model", str(model),
                   "--predictions", str(preds))
            artifacts.append(
                (
                    model.read_bytes(),
                    pathlib.Path(str(model) + ".space").read_bytes(),
                    preds.read_bytes(),
                )
            )
        assert artifacts[0] == artifacts[1]

    def test_empty_predict_input_writes_empty_file(self, tmp_path, corpus_c, capsys):
        train, _ = corpus_c
        model = tmp_path / "m"
        invoke(capsys, "train", "--train", str(train), "--model", str(model), *TRAIN_FLAGS)
        empty = tmp_path / "empty.tsv"
        write_olid(empty, [])
        preds = tmp_path / "p.csv"
        with pytest.warns(UserWarning, match="no data rows"):
            rc, out, _ = invoke(
                capsys, "predict", "--input", str(empty), "--model", str(model),
                "--predictions", str(preds),
            )
        assert rc == 0
        assert "(0 rows)" in out
        assert preds.read_bytes() == b""

    def test_predict_infers_aux_groups_from_space(self, tmp_path, corpus_c, capsys):
        train, test = corpus_c
        model = tmp_path / "m"
        # Nine linguistic features cannot separate this corpus, so the solver
        # legitimately runs out of epochs; the command must still succeed.
        with pytest.warns(UserWarning, match="max_epochs"):
            rc, out, _ = invoke(
                capsys, "train", "--train", str(train), "--model", str(model),
                "--task", "C", "--use_ngrams", "false", "--use_linguistic", "true",
                "--max_epochs", "200",
            )
        assert rc == 0
        assert "(0 n-gram slots, 9 aux slots)" in out
        preds = tmp_path / "p.csv"
        rc, _, _ = invoke(
            capsys, "predict", "--input", str(test), "--model", str(model),
            "--predictions", str(preds),
        )
        assert rc == 0
        assert len(preds.read_text().splitlines()) == 30


class TestEvaluateExtras:
    @pytest.fixture()
    def gold_a(self, tmp_path):
        path = tmp_path / "gold.tsv"
        write_olid(
            path,
            [
                olid_row("1", "angry text", label_a="OFF"),
                olid_row("2", "angrier text", label_a="OFF"),
                olid_row("3", "calm text", label_a="NOT"),
                olid_row("4", "calmer text", label_a="NOT"),
            ],
        )
        return path

    def test_permute_rescores_relabeled_predictions(self, tmp_path, gold_a, capsys):
        preds = tmp_path / "p.csv"
        preds.write_text("1,NOT\n2,NOT\n3,OFF\n4,OFF\n")
        rc, out, _ = invoke(
            capsys, "evaluate", "--eval", str(gold_a), "--predictions", str(preds)
        )
        assert rc == 0
        assert "accuracy   0.0000" in out
        rc, out, _ = invoke(
            capsys, "evaluate", "--eval", str(gold_a), "--predictions", str(preds),
            "--permute", "OFF=NOT,NOT=OFF",
        )
        assert rc == 0
        assert "accuracy   1.0000" in out

    def test_malformed_permute_spec(self, tmp_path, gold_a, capsys):
        preds = tmp_path / "p.csv"
        preds.write_text("1,OFF\n2,OFF\n3,NOT\n4,NOT\n")
        rc, _, err = invoke(
            capsys, "evaluate", "--eval", str(gold_a), "--predictions", str(preds),
            "--permute", "OFFNOT",
        )
        assert rc == 1
        assert "OLD=NEW" in err

    def test_baseline_flag_matches_baseline_command(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        write_olid(gold, separable_task_c_rows(5, seed=3))
        rc1, out1, _ = invoke(
            capsys, "evaluate", "--eval", str(gold), "--task", "C", "--baseline", "IND"
        )
        rc2, out2, _ = invoke(capsys, "baseline", "IND", "--eval", str(gold), "--task", "C")
        assert rc1 == rc2 == 0
        assert out1 == out2
        assert "IND" in out1

    def test_report_file_written(self, tmp_path, gold_a, capsys):
        preds = tmp_path / "p.csv"
        preds.write_text("1,OFF\n2,OFF\n3,NOT\n4,NOT\n")
        report = tmp_path / "report.tsv"
        rc, _, _ = invoke(
            capsys, "evaluate", "--eval", str(gold_a), "--predictions", str(preds),
            "--report", str(report),
        )
        assert rc == 0
        text = report.read_text()
        assert "accuracy\t1.0" in text
        assert "confusion" in text


class TestSelectCommand:
    def test_ranking_table_on_stdout(self, tmp_path, capsys):
        train = tmp_path / "train.tsv"
        write_olid(train, separable_task_c_rows(6, seed=4))
        rc, out, _ = invoke(
            capsys, "select", "--train", str(train), "--task", "C",
            "--n_min", "2", "--n_max", "3",
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "rank\tngram\tgain\tdf"
        ranks = [int(line.split("\t")[0]) for line in lines[1:]]
        assert ranks == list(range(1, len(ranks) + 1))
        gains = [float(line.split("\t")[2]) for line in lines[1:]]
        assert gains == sorted(gains, reverse=True)

    def test_output_key_redirects_to_file(self, tmp_path, capsys):
        train = tmp_path / "train.tsv"
        write_olid(train, separable_task_c_rows(6, seed=4))
        out_path = tmp_path / "ranking.tsv"
        rc, out, _ = invoke(
            capsys, "select", "--train", str(train), "--task", "C",
            "--n_min", "2", "--n_max", "3", "--output", str(out_path),
        )
        assert rc == 0
        assert "wrote ranking" in out
        assert out_path.read_text().startswith("rank\tngram\tgain\tdf\n")


class TestErrorPaths:
    def test_missing_required_key_names_it(self, tmp_path, capsys):
        rc, _, err = invoke(capsys, "train", "--model", str(tmp_path / "m"))
        assert rc == 1
        assert "config key 'train' is required" in err

    def test_malformed_corpus_row_cites_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n1\tonly three\tOFF\n")
        rc, _, err = invoke(
            capsys, "train", "--train", str(bad), "--model", str(tmp_path / "m")
        )
        assert rc == 1
        assert "line 2" in err
        assert "expected 2 or 5" in err

    def test_unknown_key_in_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        rc, _, err = invoke(capsys, "train", "--config", str(cfg))
        assert rc == 1
        assert "unknown config key 'bogus'" in err

    def test_bad_flag_value_names_the_key(self, tmp_path, capsys):
        rc, _, err = invoke(capsys, "train", "--k", "lots")
        assert rc == 1
        assert "config key 'k'" in err

    def test_no_active_feature_groups(self, tmp_path, corpus_c, capsys):
        train, _ = corpus_c
        rc, _, err = invoke(
            capsys, "train", "--train", str(train), "--model", str(tmp_path / "m"),
            "--task", "C", "--use_ngrams", "false",
        )
        assert rc == 1
        assert "no feature groups are active" in err

    def test_emoji_group_requires_lexicon_path(self, tmp_path, corpus_c, capsys):
        train, _ = corpus_c
        rc, _, err = invoke(
            capsys, "train", "--train", str(train), "--model", str(tmp_path / "m"),
            "--task", "C", "--use_emoji", "true",
        )
        assert rc == 1
        assert "'emoji_lexicon'" in err

    def test_space_model_fingerprint_mismatch(self, tmp_path, corpus_c, capsys):
        train, test = corpus_c
        model_a = tmp_path / "a.model"
        model_b = tmp_path / "b.model"
        invoke(capsys, "train", "--train", str(train), "--model", str(model_a),
               *TRAIN_FLAGS)
        invoke(capsys, "train", "--train", str(train), "--model", str(model_b),
               "--task", "C", "--n_min", "2", "--n_max", "4", "--k", "50",
               "--max_epochs", "500")
        rc, _, err = invoke(
            capsys, "predict", "--input", str(test), "--model", str(model_a),
            "--space", str(model_b) + ".space",
            "--predictions", str(tmp_path / "p.csv"),
        )
        assert rc == 1
        assert "fingerprint mismatch" in err

    def test_missing_predictions_file(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        write_olid(gold, [olid_row("1", "text", label_a="OFF")])
        rc, _, err = invoke(
            capsys, "evaluate", "--eval", str(gold),
            "--predictions", str(tmp_path / "nope.csv"),
        )
        assert rc == 1
        assert "offlang: error:" in err

    def test_eval_corpus_without_task_labels(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        write_olid(gold, [olid_row("1", "unlabeled text")])
        rc, _, err = invoke(
            capsys, "evaluate", "--eval", str(gold),
            "--predictions", str(tmp_path / "p.csv"),
        )
        assert rc == 1
        assert "no rows labeled for task A" in err


class TestThreadsResolution:
    def test_invalid_env_value_is_an_error(self, tmp_path, corpus_c, capsys, monkeypatch):
        monkeypatch.setenv("OFFLANG_THREADS", "many")
        train, _ = corpus_c
        rc, _, err = invoke(
            capsys, "train", "--train", str(train), "--model", str(tmp_path / "m"),
            *TRAIN_FLAGS,
        )
        assert rc == 1
        assert "OFFLANG_THREADS" in err

    def test_env_value_used_when_flag_unset(self, tmp_path, corpus_c, capsys, monkeypatch):
        monkeypatch.setenv("OFFLANG_THREADS", "2")
        train, _ = corpus_c
        rc, _, _ = invoke(
            capsys, "train", "--train", str(train), "--model", str(tmp_path / "m"),
            *TRAIN_FLAGS,
        )
        assert rc == 0

    def test_flag_beats_bad_env(self, tmp_path, corpus_c, capsys, monkeypatch):
        monkeypatch.setenv("OFFLANG_THREADS", "many")
        train, _ = corpus_c
        rc, _, _ = invoke(
            capsys, "train", "--train", str(train), "--model", str(tmp_path / "m"),
            "--threads", "1", *TRAIN_FLAGS,
        )
        assert rc == 0
