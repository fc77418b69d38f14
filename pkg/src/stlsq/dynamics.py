"""Trajectory generation, measurement noise, derivative estimates and metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from stlsq import kernels


class SimulationError(RuntimeError):
    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class TimeSeries:
    """Samples ``states[k] = u(t0 + k*h)`` on a uniform grid."""

    h: float
    t0: float
    states: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.states, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        object.__setattr__(self, "states", s)
        if not self.h > 0:
            raise ValueError("step size must be positive")
        if s.shape[0] < 3:
            raise ValueError("need at least 3 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("states contain NaN or Inf")

    @property
    def times(self):
        return self.t0 + self.h * np.arange(self.states.shape[0])

    @property
    def dim(self):
        return self.states.shape[1]

    def __len__(self):
        return self.states.shape[0]


@dataclass(frozen=True)
class NoiseModel:
    """I.i.d. Gaussian measurement noise with the given *variance*."""

    variance: float
    seed: int = 0

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError("variance must be >= 0")

    @classmethod
    def from_std(cls, std, seed=0):
        return cls(float(std) ** 2, seed)


def lorenz_rhs(u):
    u = np.asarray(u, dtype=float)
    return np.array(
        [
            10.0 * (u[1] - u[0]),
            u[0] * (28.0 - u[2]) - u[1],
            u[0] * u[1] - (8.0 / 3.0) * u[2],
        ]
    )


def thomas_rhs(u):
    u = np.asarray(u, dtype=float)
    return np.array(
        [
            -0.18 * u[0] + np.sin(u[1]),
            -0.18 * u[1] + np.sin(u[2]),
            -0.18 * u[2] + np.sin(u[0]),
        ]
    )


SYSTEMS = {"lorenz": lorenz_rhs, "thomas": thomas_rhs}
_COMPILED = {"lorenz": "rk4_lorenz", "thomas": "rk4_thomas"}


def _num_steps(h, t_end):
    if not h > 0:
        raise ValueError("h must be positive")
    if t_end < h:
        raise ValueError("t_end must be at least one step")
    ratio = t_end / h
    N = round(ratio)
    if abs(ratio - N) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"t_end={t_end} is not an integer multiple of h={h}")
    return int(N)


def rk4_integrate(system, u0, h, t_end, t0=0.0):
    """Classic fixed-step RK4 from ``t0`` over ``t_end`` time units.

    ``system`` is ``"lorenz"``, ``"thomas"`` or a callable ``f(u) -> du``.
    Named systems run on the compiled kernel when available. Returns a
    :class:`TimeSeries` with ``t_end / h + 1`` samples.
    """
    N = _num_steps(h, t_end)
    u0 = np.asarray(u0, dtype=float).ravel()
    out = np.empty((N + 1, u0.size))
    if isinstance(system, str):
        if system not in SYSTEMS:
            raise ValueError(f"unknown system {system!r}; expected one of {sorted(SYSTEMS)}")
        if u0.size != 3:
            raise ValueError(f"{system} is 3-dimensional, got u0 of length {u0.size}")
        bad = getattr(kernels, _COMPILED[system])(u0, float(h), N, out)
    else:
        bad = kernels.rk4_generic(system, u0, float(h), N, out)
    if bad >= 0:
        t = t0 + bad * h
        raise SimulationError(f"state became non-finite at t={t:g}", t)
    return TimeSeries(float(h), float(t0), out)


def gaussian_noise(shape, noise):
    """Draw the noise array for ``noise``.

    Generator: numpy ``PCG64`` seeded with ``noise.seed``; normals via numpy's
    ziggurat sampler (``Generator.standard_normal``), scaled by the standard
    deviation.
    """
    rng = np.random.Generator(np.random.PCG64(noise.seed))
    z = rng.standard_normal(shape)
    return math.sqrt(noise.variance) * z


def add_gaussian_noise(ts, noise, return_noise=False):
    """``ts`` plus i.i.d. N(0, variance) noise; same seed, same draw."""
    eta = gaussian_noise(ts.states.shape, noise)
    out = TimeSeries(ts.h, ts.t0, ts.states + eta)
    return (out, eta) if return_noise else out


def finite_difference_derivative(ts):
    """Forward difference at the first sample, backward at the last, central inside."""
    U = ts.states
    h = ts.h
    D = np.empty_like(U)
    D[1:-1] = (U[2:] - U[:-2]) / (2.0 * h)
    D[0] = (U[1] - U[0]) / h
    D[-1] = (U[-1] - U[-2]) / h
    return D


def analytic_derivative(system, ts):
    f = SYSTEMS[system] if isinstance(system, str) else system
    return np.array([f(u) for u in ts.states])


def snr(x, eta):
    """``10 log10(||x - mean(x)||^2 / ||eta||^2)`` over the flattened arrays, in dB."""
    x = np.asarray(x, dtype=float).ravel()
    eta = np.asarray(eta, dtype=float).ravel()
    noise = float(eta @ eta)
    if noise == 0.0:
        raise ValueError("SNR undefined for zero noise")
    xc = x - x.mean()
    return 10.0 * math.log10(float(xc @ xc) / noise)


def relative_error(x, x_true):
    """``||x - x_true|| / ||x_true||``; matrices are flattened column-wise."""
    x = np.asarray(x, dtype=float).ravel(order="F")
    x_true = np.asarray(x_true, dtype=float).ravel(order="F")
    denom = np.linalg.norm(x_true)
    if denom == 0:
        raise ValueError("relative error undefined for a zero reference")
    return float(np.linalg.norm(x - x_true) / denom)


def write_timeseries_csv(path, ts):
    d = ts.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"u{i + 1}" for i in range(d)])
        for t, row in zip(ts.times, ts.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def read_timeseries_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 4 or not rows[0] or rows[0][0] != "t":
        raise ValueError(f"{path}: expected a 't,u1,...' header and at least 3 samples")
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    t = data[:, 0]
    h = (t[-1] - t[0]) / (len(t) - 1)
    return TimeSeries(float(h), float(t[0]), data[:, 1:])
