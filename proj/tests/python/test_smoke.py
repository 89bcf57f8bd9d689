# Copyright 2026 The symmocc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import numpy as np
import pytest

import symmocc


def test_constant_disparity_band():
    d = np.full((4, 16), 3.0, dtype=np.float32)
    left, right = symmocc.binocular_occlusion(d, d, delta=1.0)
    assert left.dtype == np.uint8
    assert (left[:, :3] == 1).all() and (left[:, 3:] == 0).all()
    assert (right[:, -3:] == 1).all() and (right[:, :-3] == 0).all()


def test_synthetic_scene_matches_its_oracle():
    s = symmocc.synth_scene(3, 192, 128)
    assert s["left_image"].shape == (128, 192, 3)
    left, right = symmocc.binocular_occlusion(s["left_disp"], s["right_disp"])
    assert (left == s["oracle_left"]).mean() > 0.99
    assert (right == s["oracle_right"]).mean() > 0.99


def test_network_forward_shapes():
    net = symmocc.Network.build("SymmNet", 0.125, 7)
    s = symmocc.synth_scene(1, 128, 64)
    out = net.forward(s["left_image"], s["right_image"])
    assert out["prob_left"].shape == (64, 128)
    assert out["prob_right"].shape == (64, 128)
    assert ((out["prob_left"] >= 0) & (out["prob_left"] <= 1)).all()
    with pytest.raises(ValueError):
        net.forward(np.zeros((100, 100, 3)), np.zeros((100, 100, 3)))


def test_interior_parameter_parity():
    ref = symmocc.Network.build("SymmNet").interior_parameter_count()
    assert ref == symmocc.Network.build("SiameseNet").interior_parameter_count()
    assert ref == symmocc.Network.build("MonoNetL").interior_parameter_count()


def test_checkpoint_round_trip(tmp_path):
    net = symmocc.Network.build("LRCNet", 0.125, 2)
    net.save(tmp_path / "m.ckpt")
    back = symmocc.Network.load(tmp_path / "m.ckpt")
    assert back.variant == "LRCNet"
    s = symmocc.synth_scene(1, 64, 64)
    a = net.forward(s["left_image"], s["right_image"])
    b = back.forward(s["left_image"], s["right_image"])
    assert np.array_equal(a["disp_left"], b["disp_left"])


def test_metrics_and_threshold():
    pred = symmocc.threshold(np.array([[0.9, 0.6, 0.4, 0.1]]), 0.5)
    m = symmocc.prf(pred, np.array([[1, 1, 0, 0]], dtype=np.uint8))
    assert m["precision"] == 1.0 and m["recall"] == 1.0 and m["tp"] == 2
    assert symmocc.threshold(np.array([[0.5]]), 0.5)[0, 0] == 0
    assert symmocc.class_weight(0.5, 1.5) == pytest.approx(1 / np.log(2.0), abs=1e-12)
    with pytest.raises(ValueError):
        symmocc.class_weight(0.5, 1.0)


def test_pfm_round_trip(tmp_path):
    a = np.random.default_rng(0).random((5, 7), dtype=np.float32)
    symmocc.write_pfm(tmp_path / "a.pfm", a)
    assert np.array_equal(symmocc.read_pfm(tmp_path / "a.pfm"), a)


def test_cli_in_process(tmp_path):
    code, out, _ = symmocc.run_cli(["synth", "--out", str(tmp_path), "--count", "1", "--width", "128", "--height", "64"])
    assert code == 0
    assert "resolved config" in out
    assert (tmp_path / "manifest.txt").exists()
    code, _, err = symmocc.run_cli(["nope"])
    assert code == 1 and err
