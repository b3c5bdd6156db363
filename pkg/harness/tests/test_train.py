import json
import subprocess

import pytest

from conftest import PRIMARY_CLI
from nnh.data import AlignmentError, assemble_features
from nnh.formats import read_labeled, write_labeled
from nnh.model import TaggerConfig
from nnh.predict import predict_records
from nnh.train import load_tagger, train_tagger

FAST = dict(cells=16, epochs=2, learning_rate=1e-3, batch_size=8, seed=5)


class TestAlignment:
    def test_token_mismatch_fails_before_training(self, synthetic_split):
        labeled = read_labeled(synthetic_split["train_labels"])
        labeled[0][0][0] = "changed"
        write_labeled(labeled, synthetic_split["train_labels"])
        with pytest.raises(AlignmentError):
            train_tagger(
                [synthetic_split["train_records"]],
                synthetic_split["train_labels"],
                TaggerConfig(**FAST),
                synthetic_split["dir"] / "model.pt",
            )
        assert not (synthetic_split["dir"] / "model.pt").exists()

    def test_sentence_count_mismatch(self, synthetic_split):
        labeled = read_labeled(synthetic_split["train_labels"])
        write_labeled(labeled[:-1], synthetic_split["train_labels"])
        with pytest.raises(AlignmentError):
            train_tagger(
                [synthetic_split["train_records"]],
                synthetic_split["train_labels"],
                TaggerConfig(**FAST),
                synthetic_split["dir"] / "model.pt",
            )

    def test_missing_layer_detected(self, tmp_path, synthetic_split):
        pruned = tmp_path / "pruned.tsv"
        lines = synthetic_split["train_records"].read_text(encoding="utf-8").splitlines()
        pruned.write_text(
            "\n".join(l for l in lines if "\tLSTM2\t" not in l) + "\n", encoding="utf-8"
        )
        with pytest.raises(AlignmentError):
            assemble_features([pruned], ("CNN", "LSTM1", "LSTM2"))


class TestTraining:
    def test_artifact_and_log(self, synthetic_split):
        model_path = synthetic_split["dir"] / "model.pt"
        log_path = synthetic_split["dir"] / "log.json"
        config = TaggerConfig(**FAST)
        log = train_tagger(
            [synthetic_split["train_records"]],
            synthetic_split["train_labels"],
            config,
            model_path,
            log_path,
        )
        assert model_path.exists()
        assert len(log["epoch_losses"]) == config.epochs
        assert json.loads(log_path.read_text(encoding="utf-8"))["config"]["cells"] == 16
        model, loaded_config, dim = load_tagger(model_path)
        assert loaded_config.cells == 16
        assert dim == 12

    def test_default_config_matches_reference_schedule(self):
        config = TaggerConfig()
        assert config.cells == 2048
        assert config.epochs == 10
        assert config.learning_rate == pytest.approx(1e-4)
        assert config.lr_decay == pytest.approx(1e-5)
        assert len(config.layers) == 3

    def test_single_input_variant(self, synthetic_split):
        model_path = synthetic_split["dir"] / "single.pt"
        config = TaggerConfig(layers=("CNN",), **FAST)
        train_tagger(
            [synthetic_split["train_records"]],
            synthetic_split["train_labels"],
            config,
            model_path,
        )
        model, loaded, _ = load_tagger(model_path)
        assert loaded.layers == ("CNN",)
        assert model.mix is None

    def test_seeded_runs_identical_predictions(self, synthetic_split):
        outs = []
        for name in ("p1.tsv", "p2.tsv"):
            model_path = synthetic_split["dir"] / f"model-{name}.pt"
            train_tagger(
                [synthetic_split["train_records"]],
                synthetic_split["train_labels"],
                TaggerConfig(**FAST),
                model_path,
            )
            out = synthetic_split["dir"] / name
            predict_records(model_path, [synthetic_split["test_records"]], out)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]


class TestPredict:
    def _train(self, synthetic_split):
        model_path = synthetic_split["dir"] / "model.pt"
        train_tagger(
            [synthetic_split["train_records"]],
            synthetic_split["train_labels"],
            TaggerConfig(**FAST),
            model_path,
        )
        return model_path

    def test_counts_match_input(self, synthetic_split):
        model_path = self._train(synthetic_split)
        out = synthetic_split["dir"] / "pred.tsv"
        count = predict_records(model_path, [synthetic_split["test_records"]], out)
        gold = read_labeled(synthetic_split["test_labels"])
        pred = read_labeled(out)
        assert count == len(gold)
        assert [tokens for tokens, _ in pred] == [tokens for tokens, _ in gold]

    def test_primary_scorer_accepts_prediction_file(self, synthetic_split):
        model_path = self._train(synthetic_split)
        out = synthetic_split["dir"] / "pred.tsv"
        predict_records(model_path, [synthetic_split["test_records"]], out)
        report = synthetic_split["dir"] / "score.json"
        proc = subprocess.run(
            PRIMARY_CLI
            + ["ner", "score", "--gold", str(synthetic_split["test_labels"]),
               "--pred", str(out), "--report", str(report)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert report.exists()
