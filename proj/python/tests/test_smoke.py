import json

import numpy as np
import pytest

import fwsvm


def clusters():
    return fwsvm.make_two_clusters(120, 3, 3.0, 1)


def test_dataset_round_trip():
    ds = clusters()
    assert len(ds) == 120 and ds.dim == 3
    again = fwsvm.parse_libsvm(ds.to_libsvm())
    assert again == ds
    x = ds.to_dense()
    assert x.shape == (120, 3)
    assert fwsvm.Dataset(x, ds.labels) == ds


def test_parse_errors():
    with pytest.raises(fwsvm.ParseError):
        fwsvm.parse_libsvm("+1 2:1 1:3\n")
    with pytest.raises(fwsvm.IoError):
        fwsvm.load_libsvm("/nonexistent/data.txt")
    assert fwsvm.parse_libsvm("1 1:1\n0 1:2\n", remap_zero_one=True).labels.tolist() == [1, -1]


def test_identity_instance():
    ds = fwsvm.Dataset(np.array([[0.0], [100.0]]), np.array([1, 1]))
    res = fwsvm.solve(ds, gamma=1.0, c=1.0, epsilon=1e-12, kernel_mode="raw-gaussian")
    assert res.summary["iterations"] == 1
    assert res.summary["final_objective"] == 0.25
    np.testing.assert_array_equal(res.alpha, [0.5, 0.5])


def test_solve_predict_and_save(tmp_path):
    train, test = clusters(), fwsvm.make_two_clusters(200, 3, 3.0, 2)
    res = fwsvm.solve(train, gamma=0.5, c=10.0)
    s = res.summary
    assert s["termination"] == "gap-converged"
    assert s["final_gap"] <= 1e-4
    assert abs(res.alpha.sum() - 1.0) <= 1e-12
    assert res.model.support_count == s["support_vectors"]
    acc = fwsvm.evaluate(res.model, test)
    assert acc > 0.8
    pred = res.model.predict(test)
    assert np.mean(pred == test.labels) == pytest.approx(acc)
    assert np.all((res.model.decision_function(test) >= 0) == (pred == 1))
    path = tmp_path / "model.txt"
    res.model.save(str(path))
    assert fwsvm.Model.load(str(path)) == res.model
    assert fwsvm.Model.from_string(res.model.to_string()) == res.model


def test_sampled_mode_matches_full_at_full_size():
    ds = clusters()
    a = fwsvm.solve(ds, gamma=0.5, c=10.0, seed=3)
    b = fwsvm.solve(ds, gamma=0.5, c=10.0, seed=3, sample_size=len(ds))
    np.testing.assert_array_equal(a.trace["vertex"], b.trace["vertex"])
    c = fwsvm.solve(ds, gamma=0.5, c=10.0, seed=3, sample_size=10, exact_gap_every=5)
    t = c.trace
    shared = ~np.isnan(t["gap_exact"])
    assert shared.sum() == (len(t["iteration"]) + 4) // 5
    assert np.all(t["gap_approx"][shared] <= t["gap_exact"][shared] + 1e-10)


def test_errors():
    ds = clusters()
    with pytest.raises(fwsvm.ConfigError):
        fwsvm.solve(ds, gamma=0.5, c=10.0, sample_size=1000)
    with pytest.raises(fwsvm.ConfigError):
        fwsvm.solve(ds, gamma=-1.0, c=10.0)
    assert issubclass(fwsvm.ConfigError, fwsvm.Error)


def test_sampling_bound():
    assert fwsvm.min_rank_bound(1000, 950, 60) == pytest.approx(1 - 0.95**60)
    rep = fwsvm.verify_sampling(1000, 950, 60, 10000, 1)
    assert rep["pass"] and rep["empirical"] >= 0.93
    assert fwsvm.min_rank_montecarlo(1000, 0, 5, 1000) == 1.0


def test_benchmark(tmp_path):
    (tmp_path / "train.txt").write_text(clusters().to_libsvm())
    plan = {"train": "train.txt", "gamma": 0.5, "c": 10, "sample_sizes": ["full", 120, 20],
            "repetitions": 2, "out_dir": "out"}
    (tmp_path / "plan.json").write_text(json.dumps(plan))
    cells = fwsvm.run_benchmark(str(tmp_path / "plan.json"))
    assert [c["sample_size"] for c in cells] == ["full", "120", "20"]
    assert cells[0]["iterations"]["mean"] == cells[1]["iterations"]["mean"]
    assert (tmp_path / "out" / "summary.csv").exists()
    gaps = (tmp_path / "out" / "gaps.csv").read_text()
    assert "full:approx" in gaps and ":exact" not in gaps
