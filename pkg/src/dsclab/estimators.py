"""Scikit-learn style wrappers around the encoders.

Rows of X are observations; transform returns one code row per
observation. Constructor arguments are stored verbatim so clone() and
get_params() behave, and all the actual work happens in fit.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .activations import Activation, parse_activation
from .lista import compute_schedule, lista_general_run
from .model import Dictionary, DscInstance, LayeredDictionary, SignalClass
from .pipeline import solve_layered
from .pursuit import basis_pursuit, ista


def _as_activation(value):
    if value is None:
        return Activation(kind="relu")
    if isinstance(value, Activation):
        return value
    return parse_activation(value)


class IstaEncoder(TransformerMixin, BaseEstimator):
    """Sparse codes by iterative soft thresholding.

    Minimizes ||y - D x||_2^2 + gamma ||x||_1 per row.
    """

    def __init__(self, dictionary=None, gamma=0.1, iterations=100,
                 step="auto"):
        self.dictionary = dictionary
        self.gamma = gamma
        self.iterations = iterations
        self.step = step

    def fit(self, X, y=None):
        if self.dictionary is None:
            raise ValueError("dictionary is required")
        X = check_array(X)
        self.dictionary_ = (self.dictionary
                            if isinstance(self.dictionary, Dictionary)
                            else Dictionary(self.dictionary))
        if X.shape[1] != self.dictionary_.rows:
            raise ValueError(
                "X has %d features but the dictionary has %d rows"
                % (X.shape[1], self.dictionary_.rows))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionary_")
        X = check_array(X)
        out = np.empty((X.shape[0], self.dictionary_.cols))
        for i, row in enumerate(X):
            res = ista(self.dictionary_, row, self.gamma,
                       self.iterations, step=self.step)
            out[i] = res.code.values
        return out


class BasisPursuitEncoder(TransformerMixin, BaseEstimator):
    """Minimum l1-norm codes subject to exact synthesis D x = y."""

    def __init__(self, dictionary=None):
        self.dictionary = dictionary

    def fit(self, X, y=None):
        if self.dictionary is None:
            raise ValueError("dictionary is required")
        X = check_array(X)
        self.dictionary_ = (self.dictionary
                            if isinstance(self.dictionary, Dictionary)
                            else Dictionary(self.dictionary))
        if X.shape[1] != self.dictionary_.rows:
            raise ValueError(
                "X has %d features but the dictionary has %d rows"
                % (X.shape[1], self.dictionary_.rows))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionary_")
        X = check_array(X)
        out = np.empty((X.shape[0], self.dictionary_.cols))
        for i, row in enumerate(X):
            out[i] = basis_pursuit(self.dictionary_, row).values
        return out


class ListaEncoder(TransformerMixin, BaseEstimator):
    """Unrolled thresholding encoder with an analytic schedule.

    fit() solves the coherence programs for the dictionary and freezes
    the weight matrix and threshold sequence; transform() just runs the
    K-step recursion per row, so it is cheap.
    """

    def __init__(self, dictionary=None, B=1.0, s=1, delta=0.0,
                 iterations=30, activation="relu", mode="exact"):
        self.dictionary = dictionary
        self.B = B
        self.s = s
        self.delta = delta
        self.iterations = iterations
        self.activation = activation
        self.mode = mode

    def fit(self, X, y=None):
        if self.dictionary is None:
            raise ValueError("dictionary is required")
        X = check_array(X)
        self.dictionary_ = (self.dictionary
                            if isinstance(self.dictionary, Dictionary)
                            else Dictionary(self.dictionary))
        if X.shape[1] != self.dictionary_.rows:
            raise ValueError(
                "X has %d features but the dictionary has %d rows"
                % (X.shape[1], self.dictionary_.rows))
        act = _as_activation(self.activation)
        self.schedule_ = compute_schedule(
            self.dictionary_,
            SignalClass(B=self.B, s=self.s, delta=self.delta),
            self.iterations, mode=self.mode, activation=act)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "schedule_")
        X = check_array(X)
        out = np.empty((X.shape[0], self.dictionary_.cols))
        for i, row in enumerate(X):
            traj = lista_general_run(self.schedule_, self.dictionary_, row)
            out[i] = traj[-1]
        return out


class LayeredEncoder(TransformerMixin, BaseEstimator):
    """Top-down layered encoder; transform returns the deepest code."""

    def __init__(self, dictionaries=None, lam=None, eps=None, method="bp",
                 iterations=30, gamma=0.1, activation="relu", mode="exact"):
        self.dictionaries = dictionaries
        self.lam = lam
        self.eps = eps
        self.method = method
        self.iterations = iterations
        self.gamma = gamma
        self.activation = activation
        self.mode = mode

    def fit(self, X, y=None):
        if self.dictionaries is None or self.lam is None:
            raise ValueError("dictionaries and lam are required")
        X = check_array(X)
        self.dictionaries_ = (
            self.dictionaries
            if isinstance(self.dictionaries, LayeredDictionary)
            else LayeredDictionary(self.dictionaries))
        if X.shape[1] != self.dictionaries_[1].rows:
            raise ValueError(
                "X has %d features but layer 1 has %d rows"
                % (X.shape[1], self.dictionaries_[1].rows))
        self.lam_ = [int(v) for v in self.lam]
        self.eps_ = ([float(v) for v in self.eps] if self.eps is not None
                     else [0.0] * self.dictionaries_.depth)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionaries_")
        X = check_array(X)
        out = np.empty((X.shape[0], self.dictionaries_[self.dictionaries_.depth].cols))
        act = _as_activation(self.activation)
        for i, row in enumerate(X):
            inst = DscInstance(row, self.dictionaries_, self.lam_, self.eps_)
            run = solve_layered(inst, self.method, K=self.iterations,
                                activation=act, gamma=self.gamma,
                                mode=self.mode)
            out[i] = run.codes[-1].values
        return out
