"""Time-correlated Rayleigh multipath fading (Jakes-style sum of sinusoids).

Each (UE, RB) pair owns an independent fading stream built from M
low-frequency oscillators with randomized arrival angles and phases
(Zheng-Xiao construction). The complex envelope has unit mean power and
an autocorrelation that tracks J0(2*pi*f_d*tau).

Evaluating streams each TTI is one of the two hot loops; the kernel
exists in a numba build and a vectorized numpy build. Gains are pure
functions of (stream, t), so callers may evaluate any subset of streams
at any time without disturbing the others.
"""

import numpy as np

from .accel import select_kernel

SPEED_OF_LIGHT = 299792458.0


def doppler_frequency_hz(speed_mps: float, carrier_hz: float) -> float:
    """Maximum Doppler shift f_d = v / wavelength."""
    return speed_mps * carrier_hz / SPEED_OF_LIGHT


def _jakes_power_numpy(freq_i, freq_q, phase_i, phase_q, t, idx):
    # freq/phase arrays are (n_streams, M); returns linear power gains for idx
    m = freq_i.shape[1]
    fi, fq = freq_i[idx], freq_q[idx]
    h_i = np.cos(fi * t + phase_i[idx]).sum(axis=1)
    h_q = np.cos(fq * t + phase_q[idx]).sum(axis=1)
    return (h_i * h_i + h_q * h_q) / m


def _jakes_power_loop(freq_i, freq_q, phase_i, phase_q, t, idx):
    m = freq_i.shape[1]
    out = np.empty(idx.shape[0])
    for j in range(idx.shape[0]):
        s = idx[j]
        h_i = 0.0
        h_q = 0.0
        for k in range(m):
            h_i += np.cos(freq_i[s, k] * t + phase_i[s, k])
            h_q += np.cos(freq_q[s, k] * t + phase_q[s, k])
        out[j] = (h_i * h_i + h_q * h_q) / m
    return out


jakes_power = select_kernel(_jakes_power_loop, _jakes_power_numpy)

_GAIN_FLOOR = 1e-12  # -120 dB, keeps log10 finite in deep fades


class JakesFading:
    """Fading gains for an (n_ues x n_rbs) grid of independent streams.

    Oscillator tables are derived per stream from SeedSequence([seed,
    domain, ue, rb]), so a stream's realization depends only on the run
    seed and its own (ue, rb) key.
    """

    def __init__(self, seed: int, domain: int, n_ues: int, n_rbs: int,
                 doppler_hz: float, n_oscillators: int = 8):
        if n_oscillators < 8:
            raise ValueError("Jakes sum-of-sinusoids needs at least 8 oscillators")
        self.n_ues = n_ues
        self.n_rbs = n_rbs
        self.doppler_hz = doppler_hz
        m = n_oscillators
        n_streams = n_ues * n_rbs
        omega_d = 2.0 * np.pi * doppler_hz
        self._freq_i = np.empty((n_streams, m))
        self._freq_q = np.empty((n_streams, m))
        self._phase_i = np.empty((n_streams, m))
        self._phase_q = np.empty((n_streams, m))
        self._all = np.arange(n_streams)
        k = np.arange(1, m + 1)
        for ue in range(n_ues):
            for rb in range(n_rbs):
                s = ue * n_rbs + rb
                rng = np.random.default_rng(np.random.SeedSequence([seed, domain, ue, rb]))
                theta = rng.uniform(-np.pi, np.pi)
                alpha = (2.0 * np.pi * k - np.pi + theta) / (4.0 * m)
                self._freq_i[s] = omega_d * np.cos(alpha)
                self._freq_q[s] = omega_d * np.sin(alpha)
                self._phase_i[s] = rng.uniform(-np.pi, np.pi, m)
                self._phase_q[s] = rng.uniform(-np.pi, np.pi, m)

    def gains_linear(self, t: float) -> np.ndarray:
        """Linear power gains of every stream at time t, shaped (n_ues, n_rbs)."""
        g = jakes_power(self._freq_i, self._freq_q, self._phase_i, self._phase_q,
                        t, self._all)
        return g.reshape(self.n_ues, self.n_rbs)

    def gains_linear_for_ues(self, t: float, ue_idx: np.ndarray) -> np.ndarray:
        """Gains of the selected UEs only, shaped (len(ue_idx), n_rbs)."""
        idx = (ue_idx[:, None] * self.n_rbs + np.arange(self.n_rbs)[None, :]).ravel()
        g = jakes_power(self._freq_i, self._freq_q, self._phase_i, self._phase_q,
                        t, idx)
        return g.reshape(ue_idx.size, self.n_rbs)

    def gains_db(self, t: float) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.gains_linear(t), _GAIN_FLOOR))

    def complex_envelope(self, t: float) -> np.ndarray:
        """In-phase/quadrature envelope at time t (used by the correlation tests)."""
        m = self._freq_i.shape[1]
        h_i = np.cos(self._freq_i * t + self._phase_i).sum(axis=1)
        h_q = np.cos(self._freq_q * t + self._phase_q).sum(axis=1)
        return ((h_i + 1j * h_q) / np.sqrt(m)).reshape(self.n_ues, self.n_rbs)


def jakes_fading_db(fading: JakesFading, ue_id: int, rb_index: int, t: float) -> float:
    """Fading gain in dB of one (UE, RB) stream at time t."""
    g = fading.gains_linear(t)[ue_id, rb_index]
    return float(10.0 * np.log10(max(g, _GAIN_FLOOR)))
