import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from minkowski_lab.estimators import QuestionMarkTransformer


def test_transform_values():
    X = np.array([[0.0, 0.5], [1 / 3, 0.4]])
    Y = QuestionMarkTransformer().fit_transform(X)
    np.testing.assert_allclose(Y, [[0.0, 0.5], [0.25, 0.375]], atol=1e-15)


def test_inverse_on_dyadics():
    t = QuestionMarkTransformer().fit(np.zeros((1, 2)))
    U = np.array([[0.25, 0.375]])
    np.testing.assert_allclose(t.inverse_transform(U), [[1 / 3, 0.4]], atol=1e-15)


def test_validation():
    t = QuestionMarkTransformer()
    with pytest.raises(NotFittedError):
        t.transform([[0.1]])
    t.fit([[0.1, 0.2]])
    with pytest.raises(ValueError):
        t.transform([[0.1]])
    with pytest.raises(ValueError):
        t.transform([[1.5, 0.2]])
    with pytest.raises(ValueError):
        t.transform([[np.nan, 0.2]])


def test_clip_and_clone():
    t = clone(QuestionMarkTransformer(clip=True)).fit([[0.0]])
    np.testing.assert_allclose(t.transform([[-1.0], [2.0]]), [[0.0], [1.0]])
    assert t.get_params() == {"clip": True}


def test_pipeline():
    pipe = make_pipeline(QuestionMarkTransformer())
    out = pipe.fit_transform(np.linspace(0, 1, 11)[:, None])
    assert np.all(np.diff(out[:, 0]) > 0)
