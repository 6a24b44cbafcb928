"""Complex Breit-Wigner resonance extraction and strength statistics.

Scattering-matrix elements near isolated or weakly overlapping resonances
follow

    S_ba(f) = delta_ba - i * sqrt(G_na * G_nb) / (f - f_n + i*G_n/2)

summed over resonances, with partial widths entering only through the
amplitude sqrt(G_na*G_nb) and the total width G_n.  Fitting this form to
complex traces yields centres, widths and amplitudes; the squared
amplitudes ("strengths") probe the distribution of wavefunction
components, which for chaotic wavefunctions follows the K0 law of a
product of two squared Gaussian variables.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_widths
from scipy.special import k0 as bessel_k0

from .errors import InvalidArgumentError
from .statistics import StatCurve
from .validation import as_complex_array, as_float_array, check_ascending, check_positive

__all__ = [
    "ComplexTrace",
    "Resonance",
    "ResonanceSet",
    "StrengthSample",
    "breit_wigner_model",
    "detect_peaks",
    "fit_resonances",
    "strength_samples",
    "k0_strength_pdf",
    "field_intensity_from_shift",
]


@dataclass
class ComplexTrace:
    """One scattering-matrix element sampled on an ascending frequency grid."""

    frequencies: np.ndarray
    values: np.ndarray
    channel: tuple[int, int] = (1, 2)

    def __post_init__(self):
        self.frequencies = as_float_array(self.frequencies, "frequencies")
        self.values = as_complex_array(self.values, "values")
        if self.frequencies.size != self.values.size:
            raise InvalidArgumentError("frequencies and values must have equal length")
        check_ascending(self.frequencies, "frequencies")

    def __len__(self) -> int:
        return self.frequencies.size

    @property
    def is_diagonal(self) -> bool:
        return self.channel[0] == self.channel[1]


@dataclass
class Resonance:
    """One fitted resonance: centre, total width, amplitude sqrt(G_a*G_b)."""

    center: float
    width: float
    amplitude: float
    center_error: float = float("nan")
    width_error: float = float("nan")
    amplitude_error: float = float("nan")
    converged: bool = True

    def __post_init__(self):
        check_positive(self.width, "width")
        if self.amplitude < 0.0:
            raise InvalidArgumentError("amplitude must be >= 0")


@dataclass
class FitReport:
    """Diagnostics of one window fit (one cluster of resonances)."""

    converged: bool
    iterations: int
    cost: float
    cost_history: list[float] = field(repr=False, default_factory=list)
    message: str = ""
    background: complex = 0.0


@dataclass
class ResonanceSet:
    resonances: list[Resonance]
    reports: list[FitReport] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.resonances)

    @property
    def centers(self) -> np.ndarray:
        return np.array([r.center for r in self.resonances])

    @property
    def widths(self) -> np.ndarray:
        return np.array([r.width for r in self.resonances])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([r.amplitude for r in self.resonances])


def breit_wigner_model(
    resonances,
    diagonal: bool,
    frequencies,
    background: complex = 0.0,
    channel: tuple[int, int] | None = None,
) -> ComplexTrace:
    """Evaluate the multi-resonance complex Breit-Wigner sum exactly."""
    f = as_float_array(frequencies, "frequencies")
    s = np.full(f.shape, (1.0 if diagonal else 0.0) + complex(background), dtype=complex)
    for r in resonances:
        check_positive(r.width, "width")
        s -= 1j * r.amplitude / (f - r.center + 0.5j * r.width)
    if channel is None:
        channel = (1, 1) if diagonal else (1, 2)
    return ComplexTrace(f, s, channel)


# ----------------------------------------------------------------------
# Peak detection
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ResonanceGuess:
    center: float
    width: float
    amplitude: float


def detect_peaks(trace: ComplexTrace, prominence: float) -> list[ResonanceGuess]:
    """Initial resonance guesses from the modulus of the trace.

    Off-diagonal elements show peaks of |S|; diagonal elements show dips of
    |S_aa|.  The width guess comes from the half-prominence crossing: for
    the modulus of an isolated pole the full width at half maximum equals
    sqrt(3)*G off the diagonal and G for a shallow reflection dip.
    """
    if len(trace) <= 10:
        raise InvalidArgumentError("trace must be longer than 10 samples")
    prominence = check_positive(prominence, "prominence")
    mag = np.abs(trace.values)
    signal = -mag if trace.is_diagonal else mag
    idx, props = find_peaks(signal, prominence=prominence)
    if idx.size == 0:
        return []
    widths_samples = peak_widths(signal, idx, rel_height=0.5)[0]
    step = float(np.mean(np.diff(trace.frequencies)))
    guesses = []
    for j, i in enumerate(idx):
        fwhm_hz = max(widths_samples[j] * step, step)
        if trace.is_diagonal:
            gamma = fwhm_hz
            amplitude = 0.5 * props["prominences"][j] * gamma
        else:
            gamma = fwhm_hz / math.sqrt(3.0)
            amplitude = 0.5 * mag[i] * gamma
        guesses.append(ResonanceGuess(float(trace.frequencies[i]), gamma, float(amplitude)))
    return guesses


# ----------------------------------------------------------------------
# Damped least-squares fit
# ----------------------------------------------------------------------

def _bw_model_jacobian(params: np.ndarray, f: np.ndarray, delta: float):
    """Model values and complex Jacobian for the packed parameter vector.

    Layout: [f_1, a_1, w_1, ..., f_R, a_R, w_R, bg_re, bg_im] with the
    width reparametrised as G = exp(w) to keep it positive.
    """
    n_res = (params.size - 2) // 3
    centers = params[0 : 3 * n_res : 3]
    amps = params[1 : 3 * n_res : 3]
    gammas = np.exp(params[2 : 3 * n_res : 3])
    denom = f[:, None] - centers[None, :] + 0.5j * gammas[None, :]
    s = (-1j * amps[None, :] / denom).sum(axis=1) + delta + params[-2] + 1j * params[-1]
    jac = np.empty((f.size, params.size), dtype=complex)
    inv2 = denom**-2
    jac[:, 0 : 3 * n_res : 3] = -1j * amps[None, :] * inv2
    jac[:, 1 : 3 * n_res : 3] = -1j / denom
    jac[:, 2 : 3 * n_res : 3] = -0.5 * amps[None, :] * gammas[None, :] * inv2
    jac[:, -2] = 1.0
    jac[:, -1] = 1j
    return s, jac


def _lm_minimise(p0, f, data, delta, max_iter, tol):
    """Damped least-squares on the joint real/imaginary residual.

    The quadratic local model is solved with Levenberg damping scaled by
    the normal-matrix diagonal; the damping grows on every rejected step
    and shrinks after an accepted one, so the accepted cost sequence is
    nonincreasing by construction.
    """
    p = np.asarray(p0, dtype=float).copy()
    s, jac = _bw_model_jacobian(p, f, delta)
    residual = s - data
    cost = float(np.vdot(residual, residual).real)
    history = [cost]
    mu = 1e-3
    converged = False
    message = "reached max_iter"
    for _ in range(max_iter):
        jr = np.vstack([jac.real, jac.imag])
        rr = np.concatenate([residual.real, residual.imag])
        normal = jr.T @ jr
        gradient = jr.T @ rr
        scale = np.diag(normal).copy()
        scale[scale <= 0.0] = 1.0
        rel_step = np.inf
        while True:
            try:
                step = np.linalg.solve(normal + mu * np.diag(scale), -gradient)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            trial = p + step
            s_new, jac_new = _bw_model_jacobian(trial, f, delta)
            residual_new = s_new - data
            cost_new = float(np.vdot(residual_new, residual_new).real)
            if cost_new <= cost:
                rel_step = float(np.max(np.abs(step) / (np.abs(p) + 1e-300)))
                p, s, jac, residual, cost = trial, s_new, jac_new, residual_new, cost_new
                history.append(cost)
                mu = max(mu / 3.0, 1e-14)
                break
            mu *= 5.0
            if mu > 1e15:
                message = "damping overflow: no descent direction found"
                return p, cost, history, False, message, normal
        if rel_step < tol:
            converged = True
            message = "converged"
            break
    return p, cost, history, converged, message, normal


def _cluster_guesses(guesses, half_width: float):
    """Group guesses whose +-half_width*G windows overlap."""
    order = np.argsort([g.center for g in guesses])
    clusters: list[list[ResonanceGuess]] = []
    hi = -np.inf
    for i in order:
        g = guesses[i]
        lo_g = g.center - half_width * g.width
        if clusters and lo_g <= hi:
            clusters[-1].append(g)
            hi = max(hi, g.center + half_width * g.width)
        else:
            clusters.append([g])
            hi = g.center + half_width * g.width
    return clusters


def fit_resonances(
    trace: ComplexTrace,
    guesses,
    window_half_width: float = 5.0,
    max_iter: int = 200,
    tol: float = 1e-8,
) -> ResonanceSet:
    """Fit the complex Breit-Wigner form to a trace around each guess.

    Guesses whose windows (half-width ``window_half_width`` in units of
    the guessed width) overlap are fitted jointly; each window carries its
    own complex constant background accounting for the tails of
    neighbouring resonances.  The squared modulus of (model - data) is
    minimised jointly over real and imaginary parts by damped
    least-squares; widths stay positive through a log reparametrisation.

    A fit that does not converge is returned flagged
    (``Resonance.converged = False``) together with diagnostics in the
    report list, never silently dropped.
    """
    guesses = list(guesses)
    if not guesses:
        raise InvalidArgumentError("need at least one guess")
    check_positive(window_half_width, "window_half_width")
    delta = 1.0 if trace.is_diagonal else 0.0
    f = trace.frequencies
    resonances: list[Resonance] = []
    reports: list[FitReport] = []
    for cluster in _cluster_guesses(guesses, window_half_width):
        lo = min(g.center - window_half_width * g.width for g in cluster)
        hi = max(g.center + window_half_width * g.width for g in cluster)
        sel = (f >= lo) & (f <= hi)
        if np.sum(sel) < 8 * len(cluster):
            raise InvalidArgumentError(
                f"window [{lo:g}, {hi:g}] holds {int(np.sum(sel))} samples; "
                f"need >= 8 per resonance"
            )
        fw = f[sel]
        data = trace.values[sel]
        p0 = np.empty(3 * len(cluster) + 2)
        for j, g in enumerate(cluster):
            p0[3 * j : 3 * j + 3] = (g.center, g.amplitude, math.log(g.width))
        p0[-2:] = 0.0
        p, cost, history, ok, message, normal = _lm_minimise(
            p0, fw, data, delta, max_iter, tol
        )
        dof = max(2 * fw.size - p.size, 1)
        sigma2 = cost / dof
        try:
            cov_diag = sigma2 * np.diag(np.linalg.inv(normal))
        except np.linalg.LinAlgError:
            cov_diag = np.full(p.size, np.nan)
        cov_diag = np.where(cov_diag > 0.0, cov_diag, np.nan)
        for j in range(len(cluster)):
            gamma = math.exp(p[3 * j + 2])
            resonances.append(
                Resonance(
                    center=p[3 * j],
                    width=gamma,
                    amplitude=abs(p[3 * j + 1]),
                    center_error=math.sqrt(cov_diag[3 * j]) if cov_diag[3 * j] > 0 else float("nan"),
                    amplitude_error=math.sqrt(cov_diag[3 * j + 1]) if cov_diag[3 * j + 1] > 0 else float("nan"),
                    width_error=gamma * math.sqrt(cov_diag[3 * j + 2]) if cov_diag[3 * j + 2] > 0 else float("nan"),
                    converged=ok,
                )
            )
        reports.append(
            FitReport(
                converged=ok,
                iterations=len(history) - 1,
                cost=cost,
                cost_history=history,
                message=message,
                background=complex(p[-2], p[-1]),
            )
        )
    order = np.argsort([r.center for r in resonances])
    return ResonanceSet([resonances[i] for i in order], reports)


# ----------------------------------------------------------------------
# Strengths
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class StrengthSample:
    """One resonance strength y = G_a*G_b and its log-relative value z."""

    y: float
    z: float


def strength_samples(resonances, neighborhood: int = 10) -> list[StrengthSample]:
    """Strengths y = amplitude^2 normalised by a running local mean.

    The local mean <y> runs over the ``neighborhood`` resonances nearest in
    frequency (window clamped at the ends), and z = log10(y/<y>).  The
    local normalisation makes z invariant under any global rescaling of
    the amplitudes.  Zero amplitudes carry no strength information and are
    dropped with a warning.
    """
    neighborhood = int(neighborhood)
    if neighborhood < 1:
        raise InvalidArgumentError("neighborhood must be >= 1")
    res = sorted(resonances, key=lambda r: r.center)
    y = np.array([r.amplitude**2 for r in res])
    keep = y > 0.0
    if not np.all(keep):
        warnings.warn(f"dropping {int(np.sum(~keep))} zero-amplitude resonances", stacklevel=2)
        y = y[keep]
    if y.size == 0:
        return []
    samples = []
    half = neighborhood // 2
    for i in range(y.size):
        lo = max(0, min(i - half, y.size - neighborhood))
        window = y[lo : lo + neighborhood] if y.size >= neighborhood else y
        local_mean = float(window.mean())
        samples.append(StrengthSample(float(y[i]), float(np.log10(y[i] / local_mean))))
    return samples


def k0_strength_pdf(z_grid) -> StatCurve:
    """Density of z = log10(y/<y>) for the K0 strength law.

    With u = 10^z the density is P(z) = ln(10) * sqrt(u) * K0(sqrt(u)) / pi,
    the change of variables of P(y) = K0(sqrt(y))/(pi*sqrt(y)) at unit
    mean strength.
    """
    z = as_float_array(z_grid, "z_grid")
    root_u = np.power(10.0, 0.5 * z)
    pdf = math.log(10.0) / math.pi * root_u * bessel_k0(root_u)
    return StatCurve(z, pdf)


def field_intensity_from_shift(shift_map, f0: float, c1: float, normalize: bool = False):
    """Invert perturbation-body frequency shifts to a field intensity map.

    E^2 = shift / (f0 * c1), clipped at zero (a magnetic-rubber body
    eliminates the magnetic term, so negative residual shifts are noise).
    With ``normalize`` the map is scaled to unit maximum.
    """
    if c1 == 0.0:
        raise InvalidArgumentError("c1 must be nonzero")
    if f0 == 0.0:
        raise InvalidArgumentError("f0 must be nonzero")
    shift = np.asarray(shift_map, dtype=float)
    intensity = np.clip(shift / (f0 * c1), 0.0, None)
    if normalize and intensity.max() > 0.0:
        intensity = intensity / intensity.max()
    return intensity
