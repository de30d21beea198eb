"""Decoy-state BB84 link model: secure key rate and reach over fibre.

The model chain for a fibre of length ``l`` km:

    eta_f    = 10^(-alpha*l/10)                         fibre transmission
    p_DC     = r_DC * detection_window                  dark-count probability
    Y_n      = [1-(1-eta_f*eta_d)^n] + (1-eta_f*eta_d)^n * p_DC
    p_mu     = sum_n Poisson(n; mu) * Y_n               click probability
    eta_dead = 1 / (1 + tau_dead * f_rep * p_mu)        dead-time survival
    Q_mu     = p_mu * eta_dead                          system gain
    V        = mu*eta_f*eta_d / (mu*eta_f*eta_d + 2*P_e)
    E_mu     = (1 - V) / 2                              QBER
    Q_1      = Y_1 * mu * exp(-mu) * eta_dead           single-photon gain
    R        = -Q_mu * f * H2(E_mu) + Q_1 * (1 - H2(e_1))   secret bits/pulse

with ``P_e = misalignment_floor + p_DC`` and ``f`` the error-correction
inefficiency.  The per-photon-number error rates ``e_n`` are fitted so the
Poisson-weighted error series reproduces the visibility QBER (see
:func:`fit_photon_qber`).  Negative rates clamp to zero, which defines the
reach of a link.

Two detector regimes are bundled as defaults: a cryogenically cooled
detector (low dark counts, high efficiency, short dead time) and an
uncooled one.  All functions are pure and all parameter types immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SourceParams",
    "FibreParams",
    "DetectorProfile",
    "LinkModelParams",
    "RatePoint",
    "LinkBudget",
    "PhotonErrorModel",
    "FitFailureError",
    "UnattainableRateError",
    "COLD_DETECTOR",
    "WARM_DETECTOR",
    "cold_link_params",
    "warm_link_params",
    "fibre_efficiency",
    "dark_count_probability",
    "n_photon_yield",
    "detection_probability",
    "dead_time_factor",
    "system_gain",
    "visibility",
    "fit_photon_qber",
    "binary_entropy",
    "link_budget",
    "secure_key_rate",
    "max_reach",
]

# Poisson sums over the photon number are truncated here; for mu = 0.1 the
# truncation error is far below the 1e-12 agreement required against the
# closed form (tests verify this on a length grid).
POISSON_CUTOFF = 30


class FitFailureError(RuntimeError):
    """No admissible error parameter reproduces the target QBER."""


class UnattainableRateError(ValueError):
    """The requested rate exceeds what the link delivers at zero length."""


@dataclass(frozen=True)
class SourceParams:
    """Pulsed Poissonian photon source.

    Attributes:
        mu: mean photon number per pulse.
        f_rep: pulse repetition rate in Hz.
    """

    mu: float = 0.1
    f_rep: float = 1.0e8

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError("source mu must be > 0")
        if not self.f_rep > 0:
            raise ValueError("source f_rep must be > 0")


@dataclass(frozen=True)
class FibreParams:
    """Optical fibre with attenuation ``alpha`` in dB/km."""

    alpha: float = 0.2

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("fibre alpha must be >= 0")


@dataclass(frozen=True)
class DetectorProfile:
    """Single-photon detector for one temperature regime.

    Attributes:
        dark_count_rate: r_DC in Hz.
        efficiency: detection efficiency eta_d in (0, 1].
        dead_time: blocking time after a click, in seconds.
        detection_window: coincidence window in seconds; together with
            the dark count rate it fixes p_DC = r_DC * window.
        regime: ``"cold"`` or ``"warm"`` tag.
    """

    dark_count_rate: float
    efficiency: float
    dead_time: float
    detection_window: float = 3.5e-9
    regime: str = "cold"

    def __post_init__(self) -> None:
        if not 0 < self.efficiency <= 1:
            raise ValueError("detector efficiency must be in (0, 1]")
        if self.dark_count_rate < 0:
            raise ValueError("dark_count_rate must be >= 0")
        if self.dead_time < 0:
            raise ValueError("dead_time must be >= 0")
        if self.detection_window < 0:
            raise ValueError("detection_window must be >= 0")
        if self.regime not in ("warm", "cold"):
            raise ValueError("regime must be 'warm' or 'cold'")
        p_dc = self.dark_count_rate * self.detection_window
        if not 0 <= p_dc < 1:
            raise ValueError(f"dark-count probability {p_dc} outside [0, 1)")


#: Cryogenically cooled detector (superconducting-nanowire class).
COLD_DETECTOR = DetectorProfile(
    dark_count_rate=100.0, efficiency=0.85, dead_time=1.0e-6, regime="cold"
)

#: Uncooled detector (InGaAs avalanche class).
WARM_DETECTOR = DetectorProfile(
    dark_count_rate=6000.0, efficiency=0.2, dead_time=50.0e-6, regime="warm"
)


@dataclass(frozen=True)
class LinkModelParams:
    """Everything needed to evaluate one link in one regime.

    ``error_correction_efficiency`` is the inefficiency factor f >= 1 of
    the error-correcting code; ``misalignment_floor`` is the additive
    optical error term in P_e = misalignment_floor + p_DC.
    """

    source: SourceParams
    fibre: FibreParams
    detector: DetectorProfile
    error_correction_efficiency: float = 1.2
    misalignment_floor: float = 5.3e-7

    def __post_init__(self) -> None:
        if self.error_correction_efficiency < 1:
            raise ValueError("error_correction_efficiency must be >= 1")
        if self.misalignment_floor < 0:
            raise ValueError("misalignment_floor must be >= 0")


def cold_link_params(
    source: SourceParams | None = None, fibre: FibreParams | None = None
) -> LinkModelParams:
    """Default link parameters for the cooled regime."""
    return LinkModelParams(
        source=source or SourceParams(),
        fibre=fibre or FibreParams(),
        detector=COLD_DETECTOR,
    )


def warm_link_params(
    source: SourceParams | None = None, fibre: FibreParams | None = None
) -> LinkModelParams:
    """Default link parameters for the uncooled regime."""
    return LinkModelParams(
        source=source or SourceParams(),
        fibre=fibre or FibreParams(),
        detector=WARM_DETECTOR,
    )


@dataclass(frozen=True)
class RatePoint:
    """Secure key rate of a link at one length.

    ``rate_per_second == rate_per_pulse * f_rep`` and both are clamped to
    be non-negative.  ``qber`` is the visibility-based E_mu and ``gain``
    the system gain Q_mu.
    """

    length_km: float
    rate_per_pulse: float
    rate_per_second: float
    qber: float
    gain: float


@dataclass(frozen=True)
class LinkBudget:
    """All intermediate quantities behind one :class:`RatePoint`."""

    length_km: float
    eta_f: float
    p_dc: float
    p_mu: float
    eta_dead: float
    q_mu: float
    q_1: float
    visibility: float
    qber: float
    e_det: float
    e_1: float
    rate_per_pulse: float
    rate_per_second: float

    def rate_point(self) -> RatePoint:
        return RatePoint(
            length_km=self.length_km,
            rate_per_pulse=self.rate_per_pulse,
            rate_per_second=self.rate_per_second,
            qber=self.qber,
            gain=self.q_mu,
        )


def fibre_efficiency(length_km: float, fibre: FibreParams) -> float:
    """Fibre transmission 10^(-alpha*l/10); 1.0 at zero length."""
    if length_km < 0:
        raise ValueError("fibre length must be >= 0")
    return 10.0 ** (-fibre.alpha * length_km / 10.0)


def dark_count_probability(detector: DetectorProfile) -> float:
    """Probability of a dark click within one detection window."""
    p_dc = detector.dark_count_rate * detector.detection_window
    if not 0 <= p_dc < 1:
        raise ValueError(f"dark-count probability {p_dc} outside [0, 1)")
    return p_dc


def n_photon_yield(n: int, eta_f: float, eta_d: float, p_dc: float) -> float:
    """Click probability given a pulse carrying exactly n photons.

    Y_n = [1 - (1 - eta_f*eta_d)^n] + (1 - eta_f*eta_d)^n * p_dc, the
    photon term plus the dark-count term on the no-photon complement.
    """
    if n < 0:
        raise ValueError("photon number must be >= 0")
    if not 0 < eta_f <= 1 or not 0 < eta_d <= 1:
        raise ValueError("efficiencies must be in (0, 1]")
    if not 0 <= p_dc < 1:
        raise ValueError("p_dc must be in [0, 1)")
    miss = (1.0 - eta_f * eta_d) ** n
    return (1.0 - miss) + miss * p_dc


def _poisson_weights(mu: float) -> list[float]:
    """Poisson pmf values for n = 0 .. POISSON_CUTOFF."""
    weights = []
    term = math.exp(-mu)
    for n in range(POISSON_CUTOFF + 1):
        weights.append(term)
        term *= mu / (n + 1)
    return weights

def detection_probability(params: LinkModelParams, eta_f: float) -> float:
    """Click probability per source trigger, p_mu.

    Evaluated as the Poisson-weighted yield series truncated at
    ``POISSON_CUTOFF``; agrees with the closed form
    ``1 - (1 - p_dc) * exp(-mu*eta_f*eta_d)`` to better than 1e-12.
    """
    mu = params.source.mu
    eta_d = params.detector.efficiency
    p_dc = dark_count_probability(params.detector)
    total = 0.0
    for n, w in enumerate(_poisson_weights(mu)):
        total += w * n_photon_yield(n, eta_f, eta_d, p_dc)
    return total


def dead_time_factor(p_mu: float, dead_time: float, f_rep: float) -> float:
    """Fraction of clicks surviving detector dead time.

    eta_dead = 1 / (1 + tau_dead * f_rep * p_mu).
    """
    if p_mu < 0 or dead_time < 0 or f_rep < 0:
        raise ValueError("dead-time inputs must be >= 0")
    return 1.0 / (1.0 + dead_time * f_rep * p_mu)


def system_gain(p_mu: float, eta_dead: float) -> float:
    """System gain Q_mu = p_mu * eta_dead."""
    return p_mu * eta_dead


def visibility(mu: float, eta_f: float, eta_d: float, p_e: float) -> float:
    """Interference visibility V = s / (s + 2*P_e) with s = mu*eta_f*eta_d.

    The QBER follows as E_mu = (1 - V) / 2.
    """
    signal = mu * eta_f * eta_d
    denom = signal + 2.0 * p_e
    if denom <= 0:
        raise ValueError("degenerate visibility: signal + 2*P_e must be > 0")
    return signal / denom


def binary_entropy(p: float) -> float:
    """Shannon entropy H2(p) in bits, with 0*log(0) taken as 0."""
    if not 0 <= p <= 1:
        raise ValueError("binary_entropy argument must be in [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


@dataclass(frozen=True)
class PhotonErrorModel:
    """Fitted per-photon-number error rates.

    The family is ``e_n * Y_n = 0.5 * (1-eta)^n * p_dc + e_det * [1 - (1-eta)^n]``
    with ``eta = eta_f * eta_d``: dark clicks are uniformly random
    (error 0.5) and every photon-induced click errs with the fitted
    probability ``e_det``.
    """

    eta: float
    p_dc: float
    e_det: float

    def e_n(self, n: int) -> float:
        """Error rate of clicks caused by n-photon pulses."""
        miss = (1.0 - self.eta) ** n
        y_n = (1.0 - miss) + miss * self.p_dc
        if y_n == 0.0:
            # only possible for n = 0 with p_dc = 0; dark clicks are random
            return 0.5
        return (0.5 * miss * self.p_dc + self.e_det * (1.0 - miss)) / y_n

    @property
    def e_1(self) -> float:
        return self.e_n(1)


def _series_qber(
    mu: float, eta: float, p_dc: float, e_det: float, p_mu: float
) -> float:
    """QBER implied by the photon-error family at parameter e_det."""
    total = 0.0
    term = math.exp(-mu)
    for n in range(POISSON_CUTOFF + 1):
        miss = (1.0 - eta) ** n
        total += term * (0.5 * miss * p_dc + e_det * (1.0 - miss))
        term *= mu / (n + 1)
    return total / p_mu


def fit_photon_qber(params: LinkModelParams, eta_f: float) -> PhotonErrorModel:
    """Fit the per-photon-number error rates at one operating point.

    The scalar ``e_det`` is found by bisection on [0, 0.5] so that the
    Poisson-weighted error series reproduces the visibility-based QBER.
    Raises :class:`FitFailureError` when no root exists in the bracket.
    """
    mu = params.source.mu
    eta_d = params.detector.efficiency
    eta = eta_f * eta_d
    p_dc = dark_count_probability(params.detector)
    p_e = params.misalignment_floor + p_dc
    target = (1.0 - visibility(mu, eta_f, eta_d, p_e)) / 2.0
    p_mu = detection_probability(params, eta_f)

    def gap(e_det: float) -> float:
        return _series_qber(mu, eta, p_dc, e_det, p_mu) - target

    lo, hi = 0.0, 0.5
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return PhotonErrorModel(eta=eta, p_dc=p_dc, e_det=lo)
    if g_hi == 0.0:
        return PhotonErrorModel(eta=eta, p_dc=p_dc, e_det=hi)
    if g_lo > 0.0 or g_hi < 0.0:
        raise FitFailureError(
            f"no photon-error parameter in [0, 0.5] reaches QBER {target}"
        )
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if gap(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return PhotonErrorModel(eta=eta, p_dc=p_dc, e_det=0.5 * (lo + hi))


def link_budget(length_km: float, params: LinkModelParams) -> LinkBudget:
    """Evaluate the full model chain at one length.

    Returns every intermediate quantity; :func:`secure_key_rate` is the
    thin wrapper that keeps only the :class:`RatePoint`.
    """
    eta_f = fibre_efficiency(length_km, params.fibre)
    det = params.detector
    src = params.source
    p_dc = dark_count_probability(det)
    p_mu = detection_probability(params, eta_f)
    eta_dead = dead_time_factor(p_mu, det.dead_time, src.f_rep)
    q_mu = system_gain(p_mu, eta_dead)
    p_e = params.misalignment_floor + p_dc
    vis = visibility(src.mu, eta_f, det.efficiency, p_e)
    qber = (1.0 - vis) / 2.0
    error_model = fit_photon_qber(params, eta_f)
    e_1 = error_model.e_1
    y_1 = n_photon_yield(1, eta_f, det.efficiency, p_dc)
    q_1 = y_1 * src.mu * math.exp(-src.mu) * eta_dead
    rate = -q_mu * params.error_correction_efficiency * binary_entropy(qber)
    rate += q_1 * (1.0 - binary_entropy(e_1))
    rate = max(0.0, rate)
    return LinkBudget(
        length_km=length_km,
        eta_f=eta_f,
        p_dc=p_dc,
        p_mu=p_mu,
        eta_dead=eta_dead,
        q_mu=q_mu,
        q_1=q_1,
        visibility=vis,
        qber=qber,
        e_det=error_model.e_det,
        e_1=e_1,
        rate_per_pulse=rate,
        rate_per_second=rate * src.f_rep,
    )


def secure_key_rate(length_km: float, params: LinkModelParams) -> RatePoint:
    """Secret key rate at one length, clamped to zero beyond reach."""
    return link_budget(length_km, params).rate_point()


def max_reach(
    min_rate_bps: float,
    params: LinkModelParams,
    precision_km: float = 1e-3,
    grid_km: float = 1.0,
) -> float:
    """Largest length still delivering at least ``min_rate_bps``.

    Brackets the threshold by doubling, verifies the rate is monotone
    non-increasing on a ``grid_km`` grid over the bracket, then bisects
    down to ``precision_km``.

    Raises:
        UnattainableRateError: the rate at zero length is already below
            ``min_rate_bps``.
        ValueError: the rate never drops below ``min_rate_bps`` (lossless
            fibre), so no finite reach exists.
    """
    if min_rate_bps <= 0:
        raise ValueError("min_rate_bps must be > 0")

    def rate(length: float) -> float:
        return secure_key_rate(length, params).rate_per_second

    if rate(0.0) < min_rate_bps:
        raise UnattainableRateError(
            f"rate at zero length is below {min_rate_bps} bit/s"
        )
    hi = 1.0
    while rate(hi) >= min_rate_bps:
        hi *= 2.0
        if hi > 2.0 ** 15:
            raise ValueError("no finite reach: rate never falls below threshold")
    # monotonicity guard over the bracket before trusting bisection
    previous = rate(0.0)
    steps = int(math.ceil(hi / grid_km))
    for k in range(1, steps + 1):
        current = rate(min(k * grid_km, hi))
        if current > previous * (1.0 + 1e-12) + 1e-12:
            raise RuntimeError("rate is not monotone non-increasing on bracket")
        previous = current
    lo = 0.0
    while hi - lo > precision_km:
        mid = 0.5 * (lo + hi)
        if rate(mid) >= min_rate_bps:
            lo = mid
        else:
            hi = mid
    return lo
