"""Spectral synthesis of the driving noise on a periodic lattice.

The target is Gaussian noise that is white in time and fractional in space
with Hurst index H < 1/2, i.e. spatial spectral measure c_H |xi|^{1-2H} dxi
with c_H = Gamma(2H+1) sin(pi H) / (2 pi). One time step of length dt is
represented by a real lattice field w whose action on a test function phi,

    W(phi) ~ dx * sum_j phi(x_j) w_j,

has covariance matching the Riemann sum of the continuum formula

    E[W(phi) W(psi)] = dt * c_H int Fphi(xi) conj(Fpsi)(xi) |xi|^{1-2H} dxi

over the mode grid xi_k = 2 pi k / L, |k| <= N/2. Synthesis draws one
complex Gaussian per rfft mode with variance c_H |xi_k|^{1-2H} * (2 pi / L)
* dt and inverse-transforms; the zero mode is set to 0 (the spectral
density vanishes there, so this is the exact Riemann-sum value, and it
pins the torus field to zero spatial mean).

Randomness is counter-based: each (trajectory, step) pair owns an
independent Philox stream derived from the spec seed, so parallel
generation is reproducible regardless of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DomainError, InputError

__all__ = [
    "NoiseSpec",
    "NoiseState",
    "NoiseIncrement",
    "IsometryReport",
    "spectral_variances",
    "sample_increment",
    "mollify",
    "hilbert_inner_product",
    "hilbert_inner_product_increment",
    "indicator_functional",
    "isometry_check",
]


@dataclass(frozen=True)
class NoiseSpec:
    """Lattice, roughness, and reproducibility parameters of the noise.

    H: Hurst index, 0 < H < 1/2 (the joint hypothesis (3-alpha)/4 < H is
        enforced by the solver, which knows alpha).
    L: domain half-... full period length; the lattice covers [-L/2, L/2).
    N: number of lattice sites, a power of two.
    dt: time-step length carried by each sampled increment.
    epsilon: default mollification variance (space squared units), >= 0;
        0 means no smoothing. Configs spell this epsilon_space2.
    seed: 64-bit root seed for the counter-based streams.
    """

    H: float
    L: float
    N: int
    dt: float
    epsilon: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.H < 0.5):
            raise ConfigError(f"H must lie in (0, 1/2), got {self.H}", schema_path="H")
        if not (self.L > 0.0):
            raise ConfigError("L must be positive", schema_path="L")
        if self.N < 2 or (self.N & (self.N - 1)) != 0:
            raise ConfigError(f"N must be a power of two >= 2, got {self.N}", schema_path="N")
        if not (self.dt > 0.0):
            raise ConfigError("dt must be positive", schema_path="dt")
        if not (self.epsilon >= 0.0):
            raise ConfigError("epsilon must be nonnegative", schema_path="epsilon")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in 64 bits", schema_path="seed")

    @property
    def c_H(self) -> float:
        """Spectral normalization Gamma(2H+1) sin(pi H) / (2 pi), positive on (0, 1/2)."""
        return math.gamma(2.0 * self.H + 1.0) * math.sin(math.pi * self.H) / (2.0 * math.pi)

    @property
    def dx(self) -> float:
        return self.L / self.N

    def lattice(self) -> np.ndarray:
        """Site coordinates x_j = -L/2 + j dx, j = 0..N-1."""
        return -0.5 * self.L + self.dx * np.arange(self.N)

    def frequencies(self) -> np.ndarray:
        """Nonnegative angular frequencies xi_k = 2 pi k / L of the rfft modes."""
        return 2.0 * math.pi * np.arange(self.N // 2 + 1) / self.L


@dataclass(frozen=True)
class NoiseState:
    """Position in the stream space: which trajectory, which time step."""

    trajectory: int = 0
    step: int = 0

    def __post_init__(self) -> None:
        if self.trajectory < 0 or self.step < 0:
            raise InputError("trajectory and step indices must be nonnegative")

    def advanced(self, steps: int = 1) -> "NoiseState":
        return NoiseState(self.trajectory, self.step + steps)

    def with_trajectory(self, trajectory: int) -> "NoiseState":
        return NoiseState(trajectory, self.step)


@dataclass(frozen=True, eq=False)
class NoiseIncrement:
    """One time step of lattice noise with its provenance."""

    values: np.ndarray
    step_index: int
    spec: NoiseSpec

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.spec.N,):
            raise InputError(
                f"increment must have shape ({self.spec.N},), got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InputError("increment contains non-finite values")


def spectral_variances(spec: NoiseSpec) -> np.ndarray:
    """Per-mode variance of the rfft coefficients of one increment.

    Entry k is c_H xi_k^{1-2H} * Delta xi * dt with Delta xi = 2 pi / L;
    entry 0 is exactly 0. The synthesized field satisfies
    E |rfft(w)[k] / N|^2 = spectral_variances(spec)[k] for 0 < k < N/2.
    """
    xi = spec.frequencies()
    s = np.zeros(spec.N // 2 + 1)
    s[1:] = spec.c_H * xi[1:] ** (1.0 - 2.0 * spec.H) * (2.0 * math.pi / spec.L) * spec.dt
    return s


def sample_increment(spec: NoiseSpec, state: NoiseState) -> NoiseIncrement:
    """Draw the lattice noise field for one time step.

    The Philox stream is keyed by (seed, trajectory, step), so the result
    is a pure function of (spec, state): identical inputs give bit-identical
    fields, and distinct (trajectory, step) pairs are independent.
    """
    ss = np.random.SeedSequence(
        entropy=spec.seed, spawn_key=(state.trajectory, state.step)
    )
    gen = np.random.Generator(np.random.Philox(ss))
    half = spec.N // 2 + 1
    z = gen.standard_normal((2, half))
    s = spectral_variances(spec)
    c = np.sqrt(0.5 * s) * (z[0] + 1j * z[1])
    c[0] = 0.0
    # Nyquist coefficient of an even-length rfft is real; give it the full
    # per-mode variance (the +/- pair is one lattice mode there).
    c[-1] = math.sqrt(s[-1]) * z[0, -1]
    values = spec.N * np.fft.irfft(c, n=spec.N)
    return NoiseIncrement(values=values, step_index=state.step, spec=spec)


def mollify(inc: NoiseIncrement, epsilon: float) -> NoiseIncrement:
    """Smooth an increment by the Gaussian density of variance epsilon.

    Acts as the spectral multiplier exp(-epsilon xi^2 / 2), the Fourier
    transform of the mollifier.
    """
    if not (epsilon > 0.0):
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    xi = inc.spec.frequencies()
    c = np.fft.rfft(inc.values) * np.exp(-0.5 * epsilon * xi * xi)
    return NoiseIncrement(
        values=np.fft.irfft(c, n=inc.spec.N), step_index=inc.step_index, spec=inc.spec
    )


def _line_transform_products(
    spec: NoiseSpec, phi: np.ndarray, psi: np.ndarray
) -> np.ndarray:
    # dx * fft approximates the line transform; the lattice phase offset
    # cancels in the conjugate product, so it is left out.
    fp = np.fft.fft(np.asarray(phi, dtype=float))
    fq = np.fft.fft(np.asarray(psi, dtype=float))
    return (spec.dx**2) * (fp * np.conj(fq)).real


def _check_pair(spec: NoiseSpec, phi: np.ndarray, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if phi.shape != (spec.N,) or psi.shape != (spec.N,):
        raise InputError(f"lattice functions must have shape ({spec.N},)")
    return phi, psi


def hilbert_inner_product(spec: NoiseSpec, phi: np.ndarray, psi: np.ndarray) -> float:
    """Spatial covariance inner product in its Fourier form.

    Returns c_H sum_k |xi_k|^{1-2H} Fphi(xi_k) conj(Fpsi(xi_k)) Delta xi
    over the full mode grid |k| <= N/2. This is the exact second-moment
    functional of the synthesized increments: for any lattice pair,
    E[<phi, w> <psi, w>] dx^2 = dt * hilbert_inner_product(spec, phi, psi).
    """
    phi, psi = _check_pair(spec, phi, psi)
    prod = _line_transform_products(spec, phi, psi)
    xi = 2.0 * math.pi * np.abs(np.fft.fftfreq(spec.N, d=1.0 / spec.N)) / spec.L
    weights = np.zeros(spec.N)
    weights[1:] = spec.c_H * xi[1:] ** (1.0 - 2.0 * spec.H) * (2.0 * math.pi / spec.L)
    return float(np.sum(weights * prod))


def hilbert_inner_product_increment(
    spec: NoiseSpec, phi: np.ndarray, psi: np.ndarray
) -> float:
    """The same inner product in its increment (difference-weight) form.

    Evaluates H(1/2 - H) iint [phi(x+y) - phi(x)][psi(x+y) - psi(x)]
    |y|^{2H-2} dx dy by a lattice lag sum over |y| <= L/4 plus the exact
    far tail, which for separations beyond both supports factorizes to
    2 <phi, psi>_{L^2} int_{|y|>Y} |y|^{2H-2} dy. Inputs must be supported
    well inside a quarter period (bump pair around the center of the cell).

    This form approximates the continuum inner product, while the Fourier
    form is the exact lattice law; the two differ by the spectral mass of
    the pinned zero-frequency cell, which shrinks like L^{2H-2} as the
    period grows at fixed dx.
    """
    phi, psi = _check_pair(spec, phi, psi)
    dx = spec.dx
    # corr[m] = sum_j phi_{j+m} psi_j for all circular lags at once
    corr = np.fft.irfft(np.fft.rfft(phi) * np.conj(np.fft.rfft(psi)), n=spec.N)
    m = np.arange(1, spec.N // 4 + 1)
    inner = 2.0 * corr[0] - corr[m] - corr[spec.N - m]
    total = 2.0 * float(np.sum(inner * (m * dx) ** (2.0 * spec.H - 2.0))) * dx * dx
    y_cap = (spec.N // 4 + 0.5) * dx
    l2 = float(phi @ psi) * dx
    tail = 2.0 * l2 * 2.0 * y_cap ** (2.0 * spec.H - 1.0) / (1.0 - 2.0 * spec.H)
    return spec.H * (0.5 - spec.H) * (total + tail)


def indicator_functional(spec: NoiseSpec, a: float, b: float) -> np.ndarray:
    """Lattice vector representing phi = 1_{(a, b]} acting as dx * sum phi w.

    Used to build elementary rectangle integrands and the cumulated field
    W(t, x) = sum over steps of <1_{(0, x]}, w>.
    """
    if not (b > a):
        raise InputError(f"need a < b, got ({a}, {b})")
    x = spec.lattice()
    return np.where((x > a) & (x <= b), 1.0, 0.0)


@dataclass(frozen=True)
class IsometryReport:
    """Empirical vs. predicted variance of a discretized stochastic integral."""

    empirical_var: float
    predicted_var: float
    z_score: float
    samples: int

    @property
    def passed(self) -> bool:
        return abs(self.z_score) <= 3.0


def isometry_check(
    g: np.ndarray, samples: int, spec: NoiseSpec, trajectory_offset: int = 0
) -> IsometryReport:
    """Monte Carlo check of the integral isometry for a deterministic integrand.

    g has shape (n_steps, N): one lattice row per time step. Each sample
    draws fresh increments (one trajectory per sample), forms
    X = sum_n dx <g_n, w_n>, and the empirical variance of X is compared
    with dt * sum_n <g_n, g_n> in the Fourier-form inner product, which is
    the exact variance of the discrete model. The z-score is measured in
    units of the chi-squared sampling deviation of the variance estimate.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        g = g[None, :]
    if g.ndim != 2 or g.shape[1] != spec.N:
        raise InputError(f"integrand must have shape (n_steps, {spec.N})")
    if samples < 2:
        raise InputError("need at least 2 samples")
    n_steps = g.shape[0]
    predicted = spec.dt * sum(
        hilbert_inner_product(spec, g[n], g[n]) for n in range(n_steps)
    )
    dx = spec.dx
    x = np.empty(samples)
    for m in range(samples):
        acc = 0.0
        for n in range(n_steps):
            w = sample_increment(spec, NoiseState(trajectory_offset + m, n))
            acc += dx * float(g[n] @ w.values)
        x[m] = acc
    empirical = float(np.var(x, ddof=1))
    if predicted == 0.0:
        z = 0.0 if empirical == 0.0 else math.inf
    else:
        z = (empirical - predicted) / (predicted * math.sqrt(2.0 / (samples - 1)))
    return IsometryReport(
        empirical_var=empirical, predicted_var=predicted, z_score=float(z), samples=samples
    )
