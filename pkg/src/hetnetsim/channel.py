"""Radio link budget: path loss, shadowing, SINR and the SNR-to-MCS mapping.

Propagation follows the 3GPP urban macro loss model
(128.1 + 37.6*log10(d_km), 10 dB penetration, log-normal shadowing with
10 dB standard deviation). Link adaptation uses an 8-row AMC table that
maps the instantaneous per-RB SNR to a modulation/code-rate pair and a
data rate per RB-pair per TTI.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

PENETRATION_LOSS_DB = 10.0
SHADOW_SIGMA_DB = 10.0
THERMAL_NOISE_DBM_PER_HZ = -174.0
RB_PAIR_BANDWIDTH_HZ = 180e3  # 12 subcarriers x 15 kHz
SYMBOLS_PER_SLOT = 7
SLOTS_PER_TTI = 2
SUBCARRIERS_PER_RB = 12
MIN_DISTANCE_KM = 0.001  # 1 m floor under the log-distance model


class InvalidGeometryError(ValueError):
    """Raised for distances or layouts the propagation model cannot accept."""


@dataclass(frozen=True)
class PropagationLoss:
    """One link's loss decomposition, all in dB."""

    pathloss_db: float
    penetration_db: float
    shadow_db: float
    multipath_db: float

    @property
    def total_db(self) -> float:
        return self.pathloss_db + self.penetration_db + self.shadow_db + self.multipath_db


@dataclass(frozen=True)
class LinkState:
    """One UE's per-TTI channel report: SINR per RB-pair toward its serving cell."""

    ue_id: int
    cell_id: int
    sinr_per_rb_db: tuple[float, ...]


@dataclass(frozen=True)
class McsEntry:
    min_snr_db: float
    modulation_bits: int        # bits per symbol: 2 QPSK, 4 16QAM, 6 64QAM
    code_rate: Fraction
    rate_kbps_per_rbpair: int   # numerically equal to bits per TTI per RB-pair

    @property
    def name(self) -> str:
        mod = {2: "QPSK", 4: "16QAM", 6: "64QAM"}[self.modulation_bits]
        return f"{mod} {self.code_rate}"


def _mcs(min_snr: float, bits: int, num: int, den: int) -> McsEntry:
    rate = bits * SYMBOLS_PER_SLOT * SLOTS_PER_TTI * SUBCARRIERS_PER_RB * num
    assert rate % den == 0
    return McsEntry(min_snr, bits, Fraction(num, den), rate // den)


# Instantaneous downlink SNR -> modulation, code rate, kbps per RB-pair.
MCS_TABLE: tuple[McsEntry, ...] = (
    _mcs(1.7, 2, 1, 2),    # QPSK 1/2, 168 kbps
    _mcs(3.7, 2, 2, 3),    # QPSK 2/3, 224 kbps
    _mcs(4.5, 2, 3, 4),    # QPSK 3/4, 252 kbps
    _mcs(7.2, 4, 1, 2),    # 16QAM 1/2, 336 kbps
    _mcs(9.5, 4, 2, 3),    # 16QAM 2/3, 448 kbps
    _mcs(10.7, 4, 3, 4),   # 16QAM 3/4, 504 kbps
    _mcs(14.8, 6, 2, 3),   # 64QAM 2/3, 672 kbps
    _mcs(16.1, 6, 3, 4),   # 64QAM 3/4, 756 kbps
)

MCS_MIN_SNR_DB = np.array([m.min_snr_db for m in MCS_TABLE])
# rates with a leading 0 so that searchsorted indexes map below-threshold to 0
MCS_RATE_BITS = np.array([0] + [m.rate_kbps_per_rbpair for m in MCS_TABLE], dtype=np.int64)


def pathloss_db(d_km: float) -> float:
    """Urban macro path loss at distance d_km (clamped to a 1 m floor)."""
    if d_km <= 0.0:
        raise InvalidGeometryError(f"non-positive link distance: {d_km} km")
    d = max(d_km, MIN_DISTANCE_KM)
    return 128.1 + 37.6 * np.log10(d)


def pathloss_db_array(d_km: np.ndarray) -> np.ndarray:
    """Vectorized path loss; distances below the 1 m floor are clamped."""
    if np.any(d_km < 0.0):
        raise InvalidGeometryError("negative link distance")
    return 128.1 + 37.6 * np.log10(np.maximum(d_km, MIN_DISTANCE_KM))


def shadowing_sample(rng: np.random.Generator, sigma_db: float = SHADOW_SIGMA_DB) -> float:
    """One log-normal shadowing draw: Gaussian in dB, zero mean."""
    return float(rng.normal(0.0, sigma_db))


def noise_dbm_per_rbpair(noise_figure_db: float = 9.0) -> float:
    """Thermal noise over one RB-pair's 180 kHz plus the UE noise figure."""
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * np.log10(RB_PAIR_BANDWIDTH_HZ) + noise_figure_db


def dbm_to_mw(p_dbm):
    return 10.0 ** (np.asarray(p_dbm) / 10.0)


def mw_to_dbm(p_mw):
    return 10.0 * np.log10(p_mw)


def sinr_db(serving_rx_dbm: float, interferer_rx_dbm, noise_dbm: float) -> float:
    """SINR of one link: serving power over summed interference plus noise.

    All inputs in dBm; the combination happens in linear milliwatts.
    """
    interference_mw = float(np.sum(dbm_to_mw(np.asarray(interferer_rx_dbm, dtype=float))))
    return float(mw_to_dbm(dbm_to_mw(serving_rx_dbm) / (interference_mw + dbm_to_mw(noise_dbm))))


def snr_to_mcs(snr_db_value: float) -> McsEntry | None:
    """Highest-rate MCS whose threshold the SNR meets; None below 1.7 dB (no transmission)."""
    idx = int(np.searchsorted(MCS_MIN_SNR_DB, snr_db_value, side="right"))
    if idx == 0:
        return None
    return MCS_TABLE[idx - 1]


def snr_to_rate_bits(snr_db_values: np.ndarray) -> np.ndarray:
    """Vectorized SNR -> achievable bits per TTI per RB-pair (0 below threshold)."""
    idx = np.searchsorted(MCS_MIN_SNR_DB, snr_db_values, side="right")
    return MCS_RATE_BITS[idx]


def rb_pair_rate_bits(mcs: McsEntry) -> int:
    """Bits carried by one RB-pair in one TTI at this MCS."""
    rate = mcs.modulation_bits * SYMBOLS_PER_SLOT * SLOTS_PER_TTI * SUBCARRIERS_PER_RB * mcs.code_rate
    assert rate.denominator == 1
    return int(rate)


class ShadowingMap:
    """Per (UE, cell) shadowing values, redrawn after a UE moves a set distance.

    Each (ue, cell, draw_index) triple owns an independent substream of the
    run's shadowing domain, so values never depend on when other UEs redraw.
    """

    def __init__(self, seed: int, domain: int, n_ues: int, n_cells: int,
                 sigma_db: float, redraw_distance_m: float = 50.0):
        self._seed = seed
        self._domain = domain
        self._n_cells = n_cells
        self._sigma = sigma_db
        self._redraw_m = redraw_distance_m
        self._draw_index = np.zeros(n_ues, dtype=np.int64)
        self._moved_m = np.zeros(n_ues)
        self.values_db = np.empty((n_ues, n_cells))
        for ue in range(n_ues):
            self.values_db[ue] = self._draw(ue, 0)

    def _draw(self, ue: int, index: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([self._seed, self._domain, ue, index]))
        return rng.normal(0.0, self._sigma, size=self._n_cells)

    def account_movement(self, distances_m: np.ndarray) -> None:
        """Accumulate per-UE displacement and redraw rows past the threshold."""
        self._moved_m += distances_m
        for ue in np.nonzero(self._moved_m >= self._redraw_m)[0]:
            self._moved_m[ue] = 0.0
            self._draw_index[ue] += 1
            self.values_db[ue] = self._draw(ue, int(self._draw_index[ue]))
