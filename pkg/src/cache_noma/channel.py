"""Path loss, noise, effective noise variances and UE placement sampling."""
from dataclasses import dataclass, field

import numpy as np

TIE_TOL = 1e-12


class DegenerateChannelError(ValueError):
    """A zero fading gain makes the effective noise variance infinite."""


@dataclass(frozen=True)
class LinkProvenance:
    distance_km: float
    path_loss_db: float
    fading_gain: float
    noise_power_w: float


@dataclass(frozen=True)
class ChannelState:
    """Effective noise variances with UE ``i`` the strong UE.

    ``swapped`` records whether the caller's first UE became ``j``.
    """

    alpha_i: float
    alpha_j: float
    swapped: bool = False
    provenance: tuple = field(default=(None, None), compare=False)

    def __post_init__(self):
        if not (self.alpha_i > 0 and self.alpha_j > 0):
            raise ValueError("effective noise variances must be positive")
        if self.alpha_i > self.alpha_j * (1 + TIE_TOL):
            raise ValueError("alpha_i must not exceed alpha_j; use ChannelState.from_pair")

    @property
    def alpha(self):
        return (self.alpha_i, self.alpha_j)

    @classmethod
    def from_pair(cls, alpha_a, alpha_b, provenance=(None, None)):
        """Label the stronger of two UEs as ``i``; ties keep the given order."""
        if alpha_a <= alpha_b * (1 + TIE_TOL):
            return cls(alpha_a, max(alpha_a, alpha_b), False, tuple(provenance))
        return cls(alpha_b, alpha_a, True, (provenance[1], provenance[0]))


@dataclass(frozen=True)
class GeometryConfig:
    cell_radius_km: float = 3.0
    r_i_km: float = 1.0
    r_j_km: float = 2.0
    tx_power_dbm: float = 36.0
    bandwidth_hz: float = 5e6
    noise_psd_dbm_hz: float = -172.6
    pl_intercept_db: float = 128.1
    pl_slope: float = 37.6

    def __post_init__(self):
        if not 0 < self.r_i_km <= self.r_j_km <= self.cell_radius_km:
            raise ValueError("need 0 < r_i_km <= r_j_km <= cell_radius_km")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")

    @property
    def tx_power_w(self):
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def noise_w(self):
        return noise_power_w(self.noise_psd_dbm_hz, self.bandwidth_hz)


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


def path_loss_db(d_km, intercept_db=128.1, slope=37.6):
    """Macro-cell NLOS path loss ``intercept + slope*log10(d_km)`` in dB."""
    d_km = np.asarray(d_km, dtype=float)
    if np.any(d_km <= 0):
        raise ValueError("distance must be positive")
    out = intercept_db + slope * np.log10(d_km)
    return float(out) if out.ndim == 0 else out


def noise_power_w(psd_dbm_hz, bandwidth_hz):
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return 10.0 ** ((psd_dbm_hz + 10.0 * np.log10(bandwidth_hz) - 30.0) / 10.0)


def effective_alpha(pl_db, fading_gain, noise_w):
    """Noise power divided by the channel power gain (watts)."""
    if fading_gain <= 0:
        raise DegenerateChannelError("fading gain must be positive; resample the channel")
    return noise_w / (fading_gain * 10.0 ** (-pl_db / 10.0))


def disc_radius(u, radius_km):
    """Distance of a uniform point on a disc from the uniform variate ``u`` in (0, 1]."""
    return radius_km * np.sqrt(u)


def sample_placement(geometry, rng):
    """Draw ``(d_i, d_j, fading_i, fading_j)`` for one realization.

    Distances are uniform on discs of radii ``r_i_km`` and ``r_j_km``; power
    gains are unit-mean exponential (Rayleigh amplitudes).
    """
    u = 1.0 - rng.random(2)  # (0, 1]
    d_i = disc_radius(u[0], geometry.r_i_km)
    d_j = disc_radius(u[1], geometry.r_j_km)
    g = rng.exponential(1.0, size=2)
    return float(d_i), float(d_j), float(g[0]), float(g[1])


def channel_from_placement(geometry, d_i, d_j, fading_i, fading_j):
    """Effective noise variances for a placement, canonicalized by strength."""
    noise = geometry.noise_w
    links = []
    for d, g in ((d_i, fading_i), (d_j, fading_j)):
        pl = path_loss_db(d, geometry.pl_intercept_db, geometry.pl_slope)
        links.append(LinkProvenance(d, pl, g, noise))
    alphas = [effective_alpha(l.path_loss_db, l.fading_gain, noise) for l in links]
    return ChannelState.from_pair(alphas[0], alphas[1], tuple(links))
