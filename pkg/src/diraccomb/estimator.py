"""scikit-learn style front end for band computations."""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bands import RootFindOptions, band_roots, compute_bands, gaps, spectrum_intervals
from .boundary import BoundaryCondition


class DiracCombBands(BaseEstimator):
    """Band structure of the comb with a fixed boundary condition.

    ``fit`` samples the Brillouin zone; ``predict`` solves exactly at the
    requested quasimomenta, returning one column per band (NaN-padded).

    >>> from diraccomb import named
    >>> est = DiracCombBands(named("dirichlet"), q_max=2 * math.pi).fit()
    >>> [round(float(x), 6) for x in est.predict([[0.3]])[0]]
    [9.869604, 39.478418]
    """

    def __init__(
        self,
        boundary: BoundaryCondition | None = None,
        n_k: int = 201,
        q_max: float = 6 * math.pi,
        frakq_max: float = 12.0,
        scan_step: float = math.pi / 400,
        tol_eps: float = 1e-12,
        tangency_threshold: float = 1e-8,
    ):
        self.boundary = boundary
        self.n_k = n_k
        self.q_max = q_max
        self.frakq_max = frakq_max
        self.scan_step = scan_step
        self.tol_eps = tol_eps
        self.tangency_threshold = tangency_threshold

    def _options(self) -> RootFindOptions:
        return RootFindOptions(
            n_k=self.n_k,
            q_max=self.q_max,
            frakq_max=self.frakq_max,
            scan_step=self.scan_step,
            tol_eps=self.tol_eps,
            tangency_threshold=self.tangency_threshold,
        )

    def fit(self, X=None, y=None):
        if not isinstance(self.boundary, BoundaryCondition):
            raise TypeError("boundary must be a BoundaryCondition")
        self.options_ = self._options()
        self.band_structure_ = compute_bands(self.boundary, self.options_)
        self.k_grid_ = self.band_structure_.k_grid
        self.bands_ = self.band_structure_.bands
        self.intervals_ = spectrum_intervals(self.band_structure_)
        self.gaps_ = gaps(self.band_structure_)
        return self

    def predict(self, X) -> np.ndarray:
        """Energies at the quasimomenta in ``X`` (shape ``(n,)`` or ``(n, 1)``)."""
        check_is_fitted(self, "band_structure_")
        X = check_array(np.asarray(X, dtype=float).reshape(-1, 1))
        roots = [band_roots(self.boundary, float(k), self.options_) for k in X[:, 0]]
        width = max((r.size for r in roots), default=0)
        out = np.full((len(roots), width), np.nan)
        for i, r in enumerate(roots):
            out[i, : r.size] = r
        return out
