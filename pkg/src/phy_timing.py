"""
phy_timing.py

Aritmética exacta de tiempo en aire LoRa, ciclo de trabajo, redundancia
máxima y capacidad de las tramas de relay.

Todas las duraciones se calculan como (símbolos enteros o cuartos de símbolo)
· 2^s / w con fractions.Fraction; la conversión a float se hace una sola vez
al devolver el valor en segundos.

Fórmulas:

    t_sym(s)   = 2^s / w
    t_pr(s)    = (n_pr + 4.25) · t_sym
    t_pl(b, s) = [8 + max{ceil((2b - s - 5h + 11) / (s - 2l)) · (c + 4), 0}] · t_sym
    t_fr(b, s) = t_pr(s) + t_pl(b, s)

    f(r, s_sen) = t_fr((r + 1)·β, s_sen) / t
    r_max       = min{⌊b_max/β⌋, r̂_max, ⌊d_max/t⌋}
    v           = max{n : t_fr(n·(β + l_id), s_rel) <= t_tx}
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from src.errores import CapacidadNulaError, ConfigInvalidaError, RedundanciaInfactibleError

logger = logging.getLogger(__name__)

CANALES_DEFAULT_HZ = (860e6, 864e6, 868e6)

# Cota de búsqueda para r̂_max cuando el límite de ciclo es muy holgado
_R_BUSQUEDA_MAX = 100_000


def a_fraccion(x: float | int | Fraction) -> Fraction:
    """Convierte un float de configuración al racional "que el usuario escribió" (0.3 -> 3/10)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x).limit_denominator(10**12)


# ---------------------------------------------------------
# Tipos de configuración
# ---------------------------------------------------------

@dataclass(frozen=True)
class RadioConfig:
    """
    Parámetros PHY de un nodo.

    low_data_rate_opt=None se resuelve solo: l = 1 para s ∈ {11, 12} con
    w <= 125 kHz, l = 0 en otro caso.
    """
    spreading_factor: int
    bandwidth_hz: float = 125e3
    n_preamble: int = 8
    header_enabled: int = 1
    low_data_rate_opt: int | None = None
    code_param: int = 1
    tx_power_dbm: float = 14.0
    channels_hz: tuple[float, ...] = field(default=CANALES_DEFAULT_HZ)

    def __post_init__(self):
        s = self.spreading_factor
        if not isinstance(s, int) or not 7 <= s <= 12:
            raise ConfigInvalidaError("debe ser un entero entre 7 y 12", campo="spreading_factor")
        if not self.bandwidth_hz > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="bandwidth_hz")
        if self.n_preamble < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="n_preamble")
        if self.header_enabled not in (0, 1):
            raise ConfigInvalidaError("debe ser 0 o 1", campo="header_enabled")
        if not 1 <= self.code_param <= 4:
            raise ConfigInvalidaError("debe estar entre 1 y 4 (4/5..4/8)", campo="code_param")

        if self.low_data_rate_opt is None:
            auto = 1 if (s >= 11 and self.bandwidth_hz <= 125e3) else 0
            object.__setattr__(self, "low_data_rate_opt", auto)
        elif self.low_data_rate_opt not in (0, 1):
            raise ConfigInvalidaError("debe ser 0 o 1", campo="low_data_rate_opt")

        if s - 2 * self.low_data_rate_opt <= 0:
            raise ConfigInvalidaError("s - 2l debe ser positivo", campo="low_data_rate_opt")

        canales = tuple(float(c) for c in self.channels_hz)
        if not canales:
            raise ConfigInvalidaError("la lista de canales no puede estar vacía", campo="channels_hz")
        object.__setattr__(self, "channels_hz", canales)


@dataclass(frozen=True)
class TrafficConfig:
    """Tráfico de los sensores: período t, β, l_id, b_max, d_max y límite de ciclo."""
    measurement_period_s: float = 30.0
    measurement_bytes: int = 1
    sensor_id_bytes: int = 1
    storage_bytes_max: int = 10
    delay_max_s: float = 180.0
    duty_cycle_limit: float = 0.01

    def __post_init__(self):
        if not self.measurement_period_s > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="measurement_period_s")
        for nombre in ("measurement_bytes", "sensor_id_bytes", "storage_bytes_max"):
            if getattr(self, nombre) < 1:
                raise ConfigInvalidaError("debe ser un entero positivo", campo=nombre)
        if not self.delay_max_s > 0:
            raise ConfigInvalidaError("debe ser positivo", campo="delay_max_s")
        if self.delay_max_s < self.measurement_period_s:
            raise ConfigInvalidaError("debe ser >= measurement_period_s", campo="delay_max_s")
        if not 0 < self.duty_cycle_limit <= 1:
            raise ConfigInvalidaError("debe estar en (0, 1]", campo="duty_cycle_limit")


# ---------------------------------------------------------
# Duraciones
# ---------------------------------------------------------

def _t_sym_exacto(cfg: RadioConfig) -> Fraction:
    return Fraction(2 ** cfg.spreading_factor) / a_fraccion(cfg.bandwidth_hz)


def payload_symbols(payload_bytes: int, cfg: RadioConfig) -> int:
    """Cantidad entera de símbolos de payload (incluye los 8 fijos)."""
    if payload_bytes < 0:
        raise ValueError("payload_bytes no puede ser negativo")

    s, h, l, c = cfg.spreading_factor, cfg.header_enabled, cfg.low_data_rate_opt, cfg.code_param
    numerador = 2 * payload_bytes - s - 5 * h + 11
    denominador = s - 2 * l
    techo = -((-numerador) // denominador)  # ceil entero
    return 8 + max(techo * (c + 4), 0)


def frame_symbols(payload_bytes: int, cfg: RadioConfig) -> Fraction:
    """Símbolos totales de la trama (preámbulo + payload); múltiplo de 1/4."""
    return cfg.n_preamble + Fraction(17, 4) + payload_symbols(payload_bytes, cfg)


def symbol_duration(cfg: RadioConfig) -> float:
    return float(_t_sym_exacto(cfg))


def preamble_duration(cfg: RadioConfig) -> float:
    return float((cfg.n_preamble + Fraction(17, 4)) * _t_sym_exacto(cfg))


def payload_duration(payload_bytes: int, cfg: RadioConfig) -> float:
    return float(payload_symbols(payload_bytes, cfg) * _t_sym_exacto(cfg))


def frame_duration_exact(payload_bytes: int, cfg: RadioConfig) -> Fraction:
    return frame_symbols(payload_bytes, cfg) * _t_sym_exacto(cfg)


def frame_duration(payload_bytes: int, cfg: RadioConfig) -> float:
    """t_fr = t_pr + t_pl en segundos."""
    return float(frame_duration_exact(payload_bytes, cfg))


def bitrate(cfg: RadioConfig) -> float:
    """Tasa útil en bit/s: s · 4/(4 + c) · w / 2^s."""
    s = cfg.spreading_factor
    return s * (4 / (4 + cfg.code_param)) * cfg.bandwidth_hz / 2 ** s


# ---------------------------------------------------------
# Ciclo de trabajo y redundancia
# ---------------------------------------------------------

def _duty_cycle_exacto(r: int, sensor_cfg: RadioConfig, traffic: TrafficConfig) -> Fraction:
    payload = (r + 1) * traffic.measurement_bytes
    return frame_duration_exact(payload, sensor_cfg) / a_fraccion(traffic.measurement_period_s)


def duty_cycle(r: int, sensor_cfg: RadioConfig, traffic: TrafficConfig) -> float:
    """f(r, s_sen) = t_fr((r+1)β, s_sen) / t."""
    if r < 0:
        raise ValueError("r no puede ser negativo")
    return float(_duty_cycle_exacto(r, sensor_cfg, traffic))


def redundancy_bounds(sensor_cfg: RadioConfig, traffic: TrafficConfig) -> dict[str, int]:
    """
    Los tres términos de la regla de r_max:

        storage : ⌊b_max / β⌋  (bytes de mediciones pasadas almacenadas)
        duty    : r̂_max = max{r : f(r) <= límite}
        delay   : ⌊d_max / t⌋
    """
    limite = a_fraccion(traffic.duty_cycle_limit)
    if _duty_cycle_exacto(0, sensor_cfg, traffic) > limite:
        raise RedundanciaInfactibleError(
            f"f(0) = {duty_cycle(0, sensor_cfg, traffic):.6f} supera el límite "
            f"de ciclo de trabajo {traffic.duty_cycle_limit}"
        )

    r_hat = 0
    while r_hat < _R_BUSQUEDA_MAX and _duty_cycle_exacto(r_hat + 1, sensor_cfg, traffic) <= limite:
        r_hat += 1

    delay = int(a_fraccion(traffic.delay_max_s) // a_fraccion(traffic.measurement_period_s))
    storage = traffic.storage_bytes_max // traffic.measurement_bytes

    return {"storage": storage, "duty": r_hat, "delay": delay}


def max_redundancy(sensor_cfg: RadioConfig, traffic: TrafficConfig) -> int:
    """r_max = min{⌊b_max/β⌋, r̂_max, ⌊d_max/t⌋}."""
    cotas = redundancy_bounds(sensor_cfg, traffic)
    r_max = min(cotas.values())
    logger.debug("Cotas de redundancia %s -> r_max=%d", cotas, r_max)
    return r_max


def relay_capacity(relay_cfg: RadioConfig, traffic: TrafficConfig, t_tx: float) -> int:
    """
    v = max{n : t_fr(n(β + l_id), s_rel) <= t_tx}.

    t_fr es no decreciente en los bytes, así que alcanza con avanzar hasta
    la primera n que no entra.
    """
    limite = a_fraccion(t_tx)
    por_entrada = traffic.measurement_bytes + traffic.sensor_id_bytes

    n = 0
    while frame_duration_exact((n + 1) * por_entrada, relay_cfg) <= limite:
        n += 1

    if n == 0:
        raise CapacidadNulaError(
            f"t_tx = {t_tx} s no alcanza para una trama con una sola medición "
            f"({frame_duration(por_entrada, relay_cfg):.6f} s)"
        )
    return n
