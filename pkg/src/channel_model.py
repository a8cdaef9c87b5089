"""
channel_model.py

Propagación y recepción:

- potencia recibida P_rx = γ · A · d^(-α), con γ = (λ / 4π)^α · P_tx (mW)
- desvanecimiento Nakagami-m: ganancia de potencia A ~ Gamma(m, 1/m), media 1
- prueba de sensibilidad ψ(SF) y efecto captura contra el interferente más
  fuerte del mismo canal y SF

Los SF distintos y los canales distintos son ortogonales: nunca interfieren.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Protocol, Sequence

import numpy as np
from scipy import special, stats

from src.errores import ConfigInvalidaError

VELOCIDAD_LUZ = 299_792_458.0

SENSITIVITY_DBM_125KHZ = {
    7: -123.0,
    8: -126.0,
    9: -129.0,
    10: -132.0,
    11: -134.5,
    12: -137.0,
}


def dbm_a_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_a_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


# ---------------------------------------------------------
# Tipos
# ---------------------------------------------------------

@dataclass(frozen=True)
class PropagationParams:
    pathloss_exponent: float = 4.0
    wavelength_m: float = VELOCIDAD_LUZ / 868e6
    nakagami_m: float = 1.2
    sensitivity_dbm: Mapping[int, float] = field(default_factory=lambda: dict(SENSITIVITY_DBM_125KHZ))
    capture_threshold_db: float = 6.0

    def __post_init__(self):
        if not self.pathloss_exponent > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="pathloss_exponent")
        if not self.wavelength_m > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="wavelength_m")
        if not self.nakagami_m >= 0.5:
            raise ConfigInvalidaError("debe ser >= 0.5", campo="nakagami_m")
        if not self.capture_threshold_db > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="capture_threshold_db")
        # claves int aunque vengan de JSON como strings
        object.__setattr__(self, "sensitivity_dbm",
                           {int(sf): float(v) for sf, v in self.sensitivity_dbm.items()})

    def psi_mw(self, spreading_factor: int) -> float:
        """Sensibilidad lineal ψ(SF) en mW."""
        try:
            return dbm_a_mw(self.sensitivity_dbm[spreading_factor])
        except KeyError:
            raise ConfigInvalidaError(
                f"no hay sensibilidad para SF{spreading_factor}", campo="sensitivity_dbm"
            ) from None

    @property
    def capture_ratio(self) -> float:
        """Umbral de captura lineal (≈ 3.981 para 6 dB)."""
        return 10.0 ** (self.capture_threshold_db / 10.0)


@dataclass(frozen=True)
class LinkDraw:
    distance_m: float
    fading_gain: float = 1.0

    def __post_init__(self):
        if not self.distance_m > 0:
            raise ValueError("distance_m debe ser positiva")
        if not self.fading_gain > 0:
            raise ValueError("fading_gain debe ser positiva")


class TramaEnAire(Protocol):
    """Lo mínimo que resolve_receptions necesita de una trama."""
    channel: int
    spreading_factor: int
    start_s: float
    end_s: float
    rx_power_mw: Mapping[Hashable, float] | Sequence[float]


# ---------------------------------------------------------
# Potencia recibida
# ---------------------------------------------------------

def link_constant(tx_power_dbm: float, params: PropagationParams) -> float:
    """γ = (λ / 4π)^α · P_tx, en mW·m^α."""
    return (params.wavelength_m / (4 * math.pi)) ** params.pathloss_exponent * dbm_a_mw(tx_power_dbm)


def received_power(tx_power_dbm: float, params: PropagationParams, link: LinkDraw) -> float:
    """P_rx = γ · A · d^(-α) en mW."""
    gamma = link_constant(tx_power_dbm, params)
    return gamma * link.fading_gain * link.distance_m ** (-params.pathloss_exponent)


def received_power_array(tx_power_dbm: float, params: PropagationParams,
                         distances_m: np.ndarray, gains: np.ndarray) -> np.ndarray:
    """Versión vectorizada de received_power."""
    gamma = link_constant(tx_power_dbm, params)
    return gamma * np.asarray(gains) * np.asarray(distances_m, dtype=float) ** (-params.pathloss_exponent)


# ---------------------------------------------------------
# Nakagami-m
# ---------------------------------------------------------

def sample_fading(m: float, rng: np.random.Generator, size=None):
    """Ganancia de potencia Gamma(m, 1/m); determinística dado el estado de rng."""
    if m < 0.5:
        raise ValueError("m debe ser >= 0.5")
    return rng.gamma(shape=m, scale=1.0 / m, size=size)


def fading_cdf(m: float, x):
    """F_A(x) = P(m, m·x) (gamma incompleta regularizada); 0 para x <= 0."""
    x = np.asarray(x, dtype=float)
    valor = special.gammainc(m, m * np.clip(x, 0.0, None))
    valor = np.where(x > 0, valor, 0.0)
    return float(valor) if valor.ndim == 0 else valor


def fading_pdf(m: float, x):
    return stats.gamma.pdf(x, a=m, scale=1.0 / m)


def fading_quantile(m: float, q):
    """Inversa de fading_cdf."""
    return special.gammaincinv(m, q) / m


# ---------------------------------------------------------
# Colisiones y captura
# ---------------------------------------------------------

def interfiere(a: TramaEnAire, b: TramaEnAire) -> bool:
    """Mismo canal, mismo SF y solapamiento temporal no nulo."""
    return (
        a.channel == b.channel
        and a.spreading_factor == b.spreading_factor
        and a.start_s < b.end_s
        and b.start_s < a.end_s
    )


def frame_delivered(desired_mw: float, interferers_mw: Sequence[float],
                    psi_mw: float, capture_ratio: float) -> bool:
    """
    Se decodifica si supera la sensibilidad y supera por capture_ratio al
    interferente más fuerte (no a la suma).
    """
    if not desired_mw >= psi_mw:
        return False
    if len(interferers_mw) == 0:
        return True
    return desired_mw >= capture_ratio * max(interferers_mw)


def resolve_receptions(frames: Sequence[TramaEnAire], receiver: Hashable,
                       params: PropagationParams) -> list[bool]:
    """
    Resultado de cada trama de `frames` en el receptor `receiver`.

    La potencia por receptor ya viene sorteada en rx_power_mw (un
    desvanecimiento por par trama-receptor).
    """
    ratio = params.capture_ratio
    resultados = []

    for i, trama in enumerate(frames):
        interferentes = [
            otra.rx_power_mw[receiver]
            for j, otra in enumerate(frames)
            if j != i and interfiere(trama, otra)
        ]
        resultados.append(frame_delivered(
            trama.rx_power_mw[receiver],
            interferentes,
            params.psi_mw(trama.spreading_factor),
            ratio,
        ))

    return resultados
