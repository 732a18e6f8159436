"""Smoke tests for the python bindings and the command-line tool."""

import os
import subprocess
import sys

import pytest

try:
    from tip import _tip as m
except ImportError:
    import _tip as m


def make_scenes(n=30, seed=7, t_future=12):
    cfg = m.GeneratorConfig()
    cfg.n_scenes = n
    cfg.seed = seed
    cfg.t_future = t_future
    return cfg, m.generate_scenes(cfg)


def test_generate_scenes_shapes():
    cfg, scenes = make_scenes()
    assert len(scenes) == 30
    for s in scenes:
        assert s.num_agents == 2
        assert s.t_past == cfg.t_past
        assert s.t_future == cfg.t_future
        assert s.relation in (m.Relation.ObjectYieldsEgo, m.Relation.EgoYieldsObject)


def test_generation_is_deterministic():
    _, a = make_scenes()
    _, b = make_scenes()
    assert a[5].past[0].points[3].x == b[5].past[0].points[3].x
    assert a[5].id == b[5].id


def test_dataset_roundtrip(tmp_path):
    cfg, scenes = make_scenes(n=10)
    path = str(tmp_path / "data.tipds")
    m.write_dataset(scenes, path, cfg.digest_string())
    back = m.read_dataset(path)
    assert len(back) == len(scenes)
    for a, b in zip(scenes, back):
        assert a.id == b.id
        assert a.future[1].points[-1].y == b.future[1].points[-1].y


def test_path_length_and_rescale():
    traj = m.Trajectory([m.Point2d(float(i), 0.0) for i in range(5)])
    assert m.path_length(traj) == pytest.approx(4.0)
    # a generous acceleration limit so the 0.8x re-timing is not clipped
    limits = m.MotionLimits()
    limits.a_max = 1000.0
    slower = m.rescale_progress(traj, 0.8, limits)
    assert m.path_length(slower) == pytest.approx(0.8 * 4.0, rel=1e-9)


def test_auc_functions():
    assert m.roc_auc_binary([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert m.roc_auc_binary([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5
    vectors = [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]] * 2
    labels = [0, 1, 2, 0, 1, 2]
    assert m.roc_auc_ovo(vectors, labels) == pytest.approx(1.0)


def test_train_and_evaluate_round_trip(tmp_path):
    _, scenes = make_scenes(n=40, seed=52, t_future=12)
    cfg = m.TrainConfig()
    cfg.task = m.TaskKind.Warning
    cfg.t_future = 12
    cfg.epochs = 2
    cfg.k_samples = 2
    cfg.batch_size = 16
    report, result = m.train_and_evaluate(cfg, scenes)
    assert not result.aborted
    assert len(result.log) == 2
    assert 0.0 <= report.auc_roc <= 1.0
    assert report.min_ade <= report.w_ade + 1e-12

    ckpt = str(tmp_path / "model.tipckpt")
    m.save_checkpoint(ckpt, result.model_cfg, result.params)
    loaded_cfg, loaded_params = m.load_checkpoint(ckpt)
    _, val = m.split_dataset(scenes, cfg.split_seed)
    again = m.evaluate(loaded_cfg, loaded_params, val, cfg.task_spec())
    assert again.auc_roc == report.auc_roc
    assert again.min_fde == report.min_fde


def test_predict_emits_probability_weights():
    _, scenes = make_scenes(n=1, seed=3, t_future=12)
    cfg2 = m.TrainConfig()
    cfg2.task = m.TaskKind.Warning
    cfg2.t_future = 12
    cfg2.epochs = 1
    cfg2.k_samples = 3
    cfg2.batch_size = 8
    _, scenes40 = make_scenes(n=10, seed=3, t_future=12)
    _, trained = m.train_and_evaluate(cfg2, scenes40)
    scene, _ = m.normalize_scene(scenes[0])
    preds = m.predict(scene, None, trained.params, trained.model_cfg)
    assert preds.k == 3
    assert sum(preds.weights) == pytest.approx(1.0)
    assert len(preds.samples[0]) == 2  # agents
    assert len(preds.samples[0][0]) == 12  # future steps


# -- command-line tool -------------------------------------------------------

CLI = os.environ.get("TIP_CLI")


@pytest.mark.skipif(CLI is None, reason="TIP_CLI not set")
def test_cli_gen_train_eval(tmp_path):
    out = str(tmp_path)
    r = subprocess.run(
        [CLI, "gen", "--n-scenes", "40", "--t-future", "12", "--seed", "7", "--out", out],
        capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    data = os.path.join(out, "dataset.tipds")
    assert os.path.exists(data)
    back = m.read_dataset(data)
    assert len(back) == 40

    cfg_file = tmp_path / "train.cfg"
    cfg_file.write_text("task warning\nepochs 1\nk_samples 2\nbatch_size 16\nt_future 12\n")
    r = subprocess.run(
        [CLI, "train", "--config", str(cfg_file), "--out", out], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert os.path.exists(os.path.join(out, "checkpoint.tipckpt"))

    r = subprocess.run(
        [CLI, "eval", "--config", str(cfg_file), "--out", out], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "auc_roc" in r.stdout
    assert os.path.exists(os.path.join(out, "metrics.csv"))


@pytest.mark.skipif(CLI is None, reason="TIP_CLI not set")
def test_cli_unknown_flag_exits_2(tmp_path):
    r = subprocess.run(
        [CLI, "gen", "--definitely-not-a-flag"], capture_output=True, text=True)
    assert r.returncode == 2
    assert "Usage" in r.stderr or "usage" in r.stderr or "help" in r.stderr.lower()
