import json

import numpy as np
import pytest

from phasecast.errors import ModelFormatError
from phasecast.model_io import MODEL_VERSION, TrainedModel, load_model, save_model
from phasecast.network import Topology
from phasecast.pipeline import Normalizer


def make_model():
    topo = Topology(3, 2)
    genome = np.random.default_rng(8).normal(size=topo.genome_length)
    return TrainedModel(
        topology=topo,
        genome=genome,
        normalizer=Normalizer(1.25, 9.75),
        interval=300.0,
        agg_mode="mean",
        split=(0.75, 0.125, 0.125),
        metadata={"seed": 8, "train_rmse": 0.01},
    )


class TestRoundTrip:
    def test_exact_genome_round_trip(self, tmp_path):
        model = make_model()
        path = tmp_path / "m.json"
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(back.genome, model.genome)
        assert back.topology == model.topology
        assert back.normalizer == model.normalizer
        assert back.interval == 300.0
        assert back.agg_mode == "mean"
        assert back.split == (0.75, 0.125, 0.125)
        assert back.metadata["seed"] == 8

    def test_deterministic_bytes(self, tmp_path):
        model = make_model()
        save_model(model, tmp_path / "a.json")
        save_model(model, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


class TestValidation:
    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "m.json"
        save_model(make_model(), path)
        doc = json.loads(path.read_text())
        doc["version"] = MODEL_VERSION + 1
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="version"):
            load_model(path)

    def test_wrong_format_marker(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format": "something-else", "version": 1}))
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("not json at all {")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "absent.json")

    def test_genome_length_checked(self, tmp_path):
        path = tmp_path / "m.json"
        save_model(make_model(), path)
        doc = json.loads(path.read_text())
        doc["genome"] = doc["genome"][:-1]
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="genome"):
            load_model(path)
