from __future__ import annotations

import numpy as np
import pytest

from urbanlore.errors import FormatError, NonFiniteFeature, SchemaMismatch, SingleClassDataset
from urbanlore.learn import decision_values, kkt_violation, load_model, predict, predict_many, save_model, smo, train_svm

XOR = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_LABELS = ["a", "a", "b", "b"]


def blobs(seed=0, n=20):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal([-2, -2], 0.5, (n, 2)), rng.normal([2, 2], 0.5, (n, 2))])
    return x, ["neg"] * n + ["pos"] * n


def test_separable_blobs_linear():
    x, y = blobs()
    model = train_svm(x, y, kernel="linear")
    assert predict_many(model, x) == y
    sv = model.pairs[0].support_vectors
    for row in sv:
        i = int(np.flatnonzero((x == row).all(axis=1))[0])
        assert predict(model, row) == y[i]


def test_xor_rbf_and_linear():
    rbf = train_svm(XOR, XOR_LABELS, kernel="rbf")
    assert predict_many(rbf, XOR) == XOR_LABELS
    lin = train_svm(XOR, XOR_LABELS, kernel="linear")
    acc = np.mean([p == t for p, t in zip(predict_many(lin, XOR), XOR_LABELS)])
    assert acc <= 0.75


def test_xor_margins_frozen():
    # frozen after one comparison with a reference libSVM-based solver
    m = decision_values(train_svm(XOR, XOR_LABELS, kernel="rbf"), XOR)[:, 0]
    np.testing.assert_allclose(m, [0.15481812, 0.15481812, -0.15481812, -0.15481812], atol=1e-6)


@pytest.mark.parametrize("kind", ["linear", "rbf"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_kkt_conditions(kind, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(60, 3))
    y = np.where(x[:, 0] + 0.5 * rng.normal(size=60) > 0, 1.0, -1.0)
    sol = smo(x, y, kind, 1 / 3, 1.0)
    assert sol.converged
    assert np.all(sol.alpha >= 0) and np.all(sol.alpha <= 1.0 + 1e-12)
    assert abs(float(sol.alpha @ y)) < 1e-9
    assert kkt_violation(x, y, sol.alpha, sol.bias, kind, 1 / 3, 1.0) < 2e-3


def test_single_class_rejected():
    with pytest.raises(SingleClassDataset):
        train_svm(np.zeros((3, 2)), ["a"] * 3)


def test_non_finite_rejected():
    x = np.array([[0.0, np.nan], [1.0, 1.0]])
    with pytest.raises(NonFiniteFeature):
        train_svm(x, ["a", "b"])


def test_wrong_length_vector():
    model = train_svm(XOR, XOR_LABELS)
    with pytest.raises(SchemaMismatch):
        predict(model, [0.0, 0.0, 0.0])


def test_symmetric_tie_goes_to_smaller_name():
    x = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0], [-2.0, 0.0]])
    model = train_svm(x, ["zeta", "zeta", "alpha", "alpha"], kernel="linear")
    assert abs(decision_values(model, [0.0, 0.0])[0, 0]) <= 1e-12
    assert predict(model, [0.0, 0.0]) == "alpha"
    assert predict(model, [1.5, 0.0]) == "zeta"


def test_three_class_one_vs_one():
    rng = np.random.default_rng(4)
    centers = {"FT": [0, 4], "GN": [4, 0], "UL": [-4, -4]}
    x = np.vstack([rng.normal(c, 0.6, (15, 2)) for c in centers.values()])
    y = [k for k in centers for _ in range(15)]
    model = train_svm(x, y)
    assert [(p.positive, p.negative) for p in model.pairs] == [("FT", "GN"), ("FT", "UL"), ("GN", "UL")]
    assert np.mean([a == b for a, b in zip(predict_many(model, x), y)]) == 1.0


@pytest.mark.parametrize("kernel", ["linear", "rbf"])
def test_save_load_bit_exact(tmp_path, kernel):
    x, y = blobs(3)
    model = train_svm(x, y, kernel=kernel, names=["u", "v"])
    path = tmp_path / "m.svm"
    save_model(model, path)
    back = load_model(path)
    probe = np.random.default_rng(9).normal(size=(25, 2))
    assert np.array_equal(decision_values(back, probe), decision_values(model, probe))
    assert back.names == ("u", "v") and back.schema_hash == model.schema_hash


def test_load_rejects_corruption(tmp_path):
    path = tmp_path / "m.svm"
    save_model(train_svm(XOR, XOR_LABELS), path)
    raw = bytearray(path.read_bytes())
    raw[-3] ^= 0x55
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        load_model(path)
