"""Autocorrelation analysis, integrated autocorrelation time, and ESJD.

The efficiency of an ensemble chain is judged on the scalar series
F(m) = mean_i f(x_i(m)): its integrated autocorrelation time tau tells how
many iterations one effectively pays per independent sample.  tau is
estimated with the usual self-consistent window: the reported window W is
the smallest lag with W >= c * tau(W).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def ensemble_observable_series(history, f) -> np.ndarray:
    """Per-iteration ensemble mean of f over a position history (M, N, d)."""
    history = np.asarray(history, dtype=np.float64)
    if history.ndim != 3 or history.shape[0] < 1:
        raise ValueError("history must be a non-empty (iterations, walkers, dim) array")
    return np.mean(f(history), axis=1)


def autocovariance(series) -> np.ndarray:
    """Biased (1/M-normalized) empirical autocovariance at lags 0..M-1.

    Computed via FFT of the mean-subtracted, zero-padded series.  Raises on
    constant input ("zero variance").
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("series must be 1-d with at least 4 entries")
    m = x.size
    x = x - x.mean()
    nfft = 1 << int(2 * m - 1).bit_length()
    spec = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[:m] / m
    if acov[0] <= 0:
        raise ValueError("zero variance: series is constant")
    return acov


def normalized_acf(series) -> np.ndarray:
    """Autocorrelation function rho(m) = C(m)/C(0); rho(0) is exactly 1."""
    acov = autocovariance(series)
    rho = acov / acov[0]
    rho[0] = 1.0
    return rho


@dataclass
class ActEstimate:
    """Integrated autocorrelation time with its self-consistent window."""

    tau: float
    window: int
    acf: np.ndarray
    thin: int = 1
    converged: bool = True

    @property
    def tau_unthinned(self) -> float:
        """tau in pre-thinning iteration units."""
        return self.tau * self.thin


def integrated_act(acf, c: float = 5.0, thin: int = 1) -> ActEstimate:
    """Integrate the autocorrelation function with a self-consistent window.

    tau(W) = 1 + 2 sum_{m=1..W} rho(m); the window is the smallest W with
    W >= c * tau(W), searched up to half the series length.  If no window
    satisfies the rule the estimate is flagged unconverged and reports the
    value at the search cap.
    """
    rho = np.asarray(acf, dtype=np.float64)
    if rho.ndim != 1 or rho.size < 2:
        raise ValueError("need an autocorrelation sequence with at least 2 lags")
    cap = min(rho.size - 1, rho.size // 2)
    taus = 1.0 + 2.0 * np.cumsum(rho[1:cap + 1])
    windows = np.arange(1, cap + 1)
    ok = windows >= c * taus
    if np.any(ok):
        w = int(windows[np.argmax(ok)])
        return ActEstimate(float(taus[w - 1]), w, rho, thin, True)
    return ActEstimate(float(taus[-1]), cap, rho, thin, False)


def act_from_series(series, c: float = 5.0, thin: int = 1) -> ActEstimate:
    """Estimate the integrated autocorrelation time of a scalar series."""
    return integrated_act(normalized_acf(series), c=c, thin=thin)


def esjd(history) -> float:
    """Expected squared jump distance of a position history (M, N, d).

    Mean over iterations and walkers of |x(m+1) - x(m)|^2.
    """
    history = np.asarray(history, dtype=np.float64)
    if history.ndim != 3 or history.shape[0] < 2:
        raise ValueError("need at least 2 recorded iterations")
    jumps = np.diff(history, axis=0)
    return float(np.mean(np.sum(jumps * jumps, axis=-1)))
