# Copyright 2026 The CSCA Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import subprocess

import numpy as np
import pytest

import csca


@pytest.fixture(scope="module")
def synthetic(tmp_path_factory):
    directory = tmp_path_factory.mktemp("synthetic")
    manifest, annotations = csca.make_synthetic(str(directory), n_train=32, n_val=8, n_test=8, image_size=32, seed=3)
    csca.set_log_level("error")
    return csca.ingest(manifest, annotations)


@pytest.fixture(scope="module")
def trained(synthetic):
    return csca.train(synthetic, {"max_epochs": 5, "learning_rate": 1e-3, "toy_embed_dim": 16})


def test_config_defaults_and_overrides():
    config = csca.default_config()
    assert config["temperature"] == 0.01
    assert config["early_stop_patience"] == 10
    resolved = csca.resolve_config({"seed": 4})
    assert resolved["seed"] == 4
    assert csca.config_fingerprint(resolved) != csca.config_fingerprint()
    assert csca.ablation_config(1)["use_lcr"] is False
    with pytest.raises(csca.ConfigError):
        csca.resolve_config({"batch_size": 0})
    with pytest.raises(csca.ConfigError):
        csca.ablation_config(6)


def test_metrics_match_hand_values():
    assert csca.average_ranks([1.0, 2.0, 2.0, 3.0]) == [1.0, 2.5, 2.5, 4.0]
    assert csca.srcc([1, 2, 2, 3], [1, 2, 3, 4]) == pytest.approx(4.5 / math.sqrt(22.5), abs=1e-12)
    assert csca.plcc([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(csca.DegenerateInputError):
        csca.srcc([1, 1, 1], [1, 2, 3])


def test_ingest_records(synthetic):
    assert len(synthetic) == 48
    train = [r for r in synthetic if r.split == "train"]
    assert min(r.rating_norm for r in train) == 0.0
    assert max(r.rating_norm for r in train) == 1.0
    for r in train:
        assert r.style_scalar == pytest.approx(r.rating_raw, abs=1e-12)
        assert r.content_label is not None


def test_store_round_trip(synthetic, tmp_path):
    path = str(tmp_path / "store.csv")
    csca.save_store(path, synthetic, "abc")
    assert csca.load_store(path) == synthetic


def test_imaging_arrays(synthetic):
    inverted = csca.load_inverted(synthetic[0].image_path)
    assert inverted.shape == (3, 32, 32)
    assert csca.ink_intensity(synthetic[0].image_path) == pytest.approx(inverted.mean(), abs=1e-12)
    stats = csca.ChannelStats()
    assert csca.preprocess(inverted, stats).shape == (3, 224, 224)


def test_train_evaluate_predict(synthetic, trained, tmp_path):
    assert 1 <= trained.best_epoch <= 5
    assert len(trained.history) <= 5
    path = str(tmp_path / "checkpoint.bin")
    trained.checkpoint.save(path)
    checkpoint = csca.Checkpoint.load(path)
    assert checkpoint.fingerprint == trained.checkpoint.fingerprint

    report = csca.evaluate(checkpoint, synthetic)
    assert [e["subset"] for e in report["subsets"]] == ["primary_test"]
    assert -1.0 <= report["subsets"][0]["srcc"] <= 1.0
    with pytest.raises(csca.DegenerateInputError):
        csca.evaluate(checkpoint, synthetic, subsets=["fg"])

    predictor = csca.Predictor(checkpoint)
    out = predictor.predict(synthetic[0].image_path)
    assert 0.2 <= out["score"] <= 1.0
    assert sum(out["level_probs"].values()) == pytest.approx(1.0, abs=1e-9)
    assert set(out["content_probs"]) == {"object", "animal", "human", "plant", "other"}


class ProjectionBundle(csca.EncoderBundle):
    """Python encoder wrapping the toy encoder, to exercise the adapter path."""

    def __init__(self):
        super().__init__()
        self.inner = csca.toy_bundle(16, 3)
        self.image_calls = 0

    def model_id(self):
        return "python-toy"

    def embed_dim(self):
        return 16

    def token_dim(self):
        return self.inner.token_dim()

    def encode_image(self, image):
        self.image_calls += 1
        return self.inner.encode_image(image)

    def tokenize(self, text):
        return self.inner.tokenize(text)

    def embed_tokens(self, ids):
        return self.inner.embed_tokens(ids)

    def encode_text(self, tokens):
        return self.inner.encode_text(tokens)

    def encode_text_backward(self, tokens, grad):
        return self.inner.encode_text_backward(tokens, grad)

    def parameter_checksum(self):
        return 12345


def test_python_encoder_bundle(synthetic):
    bundle = ProjectionBundle()
    run = csca.train(synthetic, {"max_epochs": 2, "learning_rate": 1e-3}, bundle=bundle)
    assert bundle.image_calls == 40
    assert run.checkpoint.backbone_id == "python-toy"
    report = csca.evaluate(run.checkpoint, synthetic, bundle=bundle)
    assert report["subsets"][0]["n"] == 8
    score = csca.Predictor(run.checkpoint, bundle=bundle).score_features(np.eye(16)[0], 0.5)["score"]
    assert 0.2 <= score <= 1.0


def test_analysis_on_synthetic(synthetic):
    test = [r for r in synthetic if r.split == "test"]
    rows = csca.style_rating_correlation(test)
    assert rows[-1]["category"] == "combined"
    assert rows[-1]["srcc"] == pytest.approx(1.0, abs=1e-12)
    cells = csca.binned_rating_means(test, 5)
    assert sum(c["n"] for c in cells if c["category"] == "object") == sum(
        1 for r in test if r.content_label == "object")


@pytest.mark.skipif("CSCA_CLI" not in os.environ, reason="CSCA_CLI not set")
def test_cli_config_matches_module():
    out = subprocess.run([os.environ["CSCA_CLI"], "config"], check=True, capture_output=True, text=True).stdout
    import json

    assert json.loads(out) == csca.default_config()
