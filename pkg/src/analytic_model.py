"""
analytic_model.py

Evaluación numérica de la probabilidad de pérdida de una medición (MLP):

    MLP   = P_dir · Π_i P_ri
    P_dir = (1 - (1 - P_i)(1 - P_f))^(r+1)
    P_ri  = 1 - P_rw (1 - P_s-ri)(1 - P_drop,ri)(1 - P_ri-g)

    P_f   = ∫ F_A(γ^-1 u^α ψ) f_D(u) du
    P_i   = 1 - ∬ exp(-κ(a, w)) f_A(a) f_D(w) da dw
    κ     = n_c^-1 (n - 1) f(r) [1 - ∫ F_A(c_cap · a · u^α · w^-α) f_D(u) du]

    P_rw  = (t_rx - t_f) / (t_rx + t_tx)
    P_drop: suma doble sobre Y = μ + η (η ~ Bin(n, p)) y Z | Y ~ Bin(Y, 1 - θ),
            o su aproximación con μ + n ensayos

Las integrales usan Gauss-Legendre de orden fijo (128 nodos por eje) y un
paso de refinamiento (256 nodos) como estimación del error. El soporte del
desvanecimiento se trunca en el cuantil 1 - 1e-9 de la Gamma.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special, stats

from src import phy_timing
from src.channel_model import PropagationParams, fading_cdf, fading_pdf, fading_quantile, link_constant
from src.errores import ConfigInvalidaError, CuadraturaError
from src.phy_timing import RadioConfig, TrafficConfig

logger = logging.getLogger(__name__)

ORDEN_DEFAULT = 128
COLA_FADING = 1e-9


@lru_cache(maxsize=None)
def _gauss_legendre(orden: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = special.roots_legendre(orden)
    return x, w


def _nodos_en(a: float, b: float, orden: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(orden)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


# ---------------------------------------------------------
# Leyes de distancia y de desvanecimiento
# ---------------------------------------------------------

@dataclass(frozen=True)
class UniformDistance:
    """Distancia uniforme en [lo, hi] metros."""
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise ConfigInvalidaError(f"se necesita 0 < lo < hi (lo={self.lo}, hi={self.hi})",
                                      campo="distance_law")

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= self.lo) & (u <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def cdf(self, u):
        u = np.asarray(u, dtype=float)
        return np.clip((u - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def nodes(self, orden: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodos y pesos de E[g(D)] (los pesos ya incluyen f_D)."""
        u, w = _nodos_en(self.lo, self.hi, orden)
        return u, w / (self.hi - self.lo)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=size)


@dataclass(frozen=True)
class PointDistance:
    """Distancia degenerada en u metros."""
    u: float

    def __post_init__(self):
        if not self.u > 0:
            raise ConfigInvalidaError("la distancia debe ser positiva", campo="distance_law")

    @property
    def support(self) -> tuple[float, float]:
        return self.u, self.u

    def pdf(self, u):
        raise NotImplementedError("una masa puntual no tiene densidad")

    def cdf(self, u):
        return np.where(np.asarray(u, dtype=float) >= self.u, 1.0, 0.0)

    def nodes(self, orden: int) -> tuple[np.ndarray, np.ndarray]:
        return np.array([self.u]), np.array([1.0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.u)


DistanceLaw = UniformDistance | PointDistance


def distance_law_from_dict(datos: dict) -> DistanceLaw:
    """{"law": "uniform", "lo": 42, "hi": 59} o {"law": "point", "u": 50}."""
    tipo = str(datos.get("law", "uniform")).strip().lower()
    if tipo == "uniform":
        return UniformDistance(float(datos["lo"]), float(datos["hi"]))
    if tipo == "point":
        return PointDistance(float(datos["u"]))
    raise ConfigInvalidaError(f"ley de distancia desconocida: {tipo!r}", campo="law")


@dataclass(frozen=True)
class FadingLaw:
    """Nakagami-m en potencia: A ~ Gamma(m, 1/m), soporte truncado en el cuantil 1 - tail."""
    m: float = 1.2
    tail: float = COLA_FADING

    def cdf(self, x):
        return fading_cdf(self.m, x)

    def pdf(self, x):
        return fading_pdf(self.m, x)

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, float(fading_quantile(self.m, 1.0 - self.tail))

    def nodes(self, orden: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Nodos de E[g(A)] con a = s^(1/m): f_A(a) da = m^(m-1) e^(-m a) / Γ(m) ds,
        suave en los dos extremos de [0, a_max^m].
        """
        m = self.m
        _, a_max = self.support
        s, w = _nodos_en(0.0, a_max ** m, orden)
        a = s ** (1.0 / m)
        return a, w * m ** (m - 1) * np.exp(-m * a) / special.gamma(m)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(shape=self.m, scale=1.0 / self.m, size=size)


# Aproximaciones "crudas" de las distancias del escenario por defecto
DIST_SENSOR_GW = UniformDistance(42.0, 59.0)
DIST_SENSOR_RELAY = UniformDistance(10.0, 52.0)
DIST_RELAY_GW = UniformDistance(14.1, 28.3)


def _gamma_default() -> float:
    return link_constant(14.0, PropagationParams())


def _psi_default(sf: int) -> Callable[[], float]:
    return lambda: PropagationParams().psi_mw(sf)


# ---------------------------------------------------------
# Entradas y resultados
# ---------------------------------------------------------

@dataclass(frozen=True)
class AnalyticInputs:
    """
    Todos los símbolos necesarios para evaluar la cadena de la MLP.

    gamma/psi corresponden a las tramas de los sensores (SF del sensor, tanto
    en el gateway como en los relays); gamma_relay/psi_relay a las tramas de
    los relays hacia el gateway. Las leyes de los relays pueden ser una sola
    (relays idénticos) o una tupla con una ley por relay.
    """
    n: int = 60
    n_c: int = 3
    omega: int = 0
    r: int = 3
    alpha: float = 4.0
    gamma: float = field(default_factory=_gamma_default)
    psi: float = field(default_factory=_psi_default(10))
    gamma_relay: float = field(default_factory=_gamma_default)
    psi_relay: float = field(default_factory=_psi_default(7))
    capture_factor: float = 0.25
    fading: FadingLaw = FadingLaw()
    dist_sensor_gw: DistanceLaw = DIST_SENSOR_GW
    dist_sensor_relay: DistanceLaw | tuple[DistanceLaw, ...] = DIST_SENSOR_RELAY
    dist_relay_gw: DistanceLaw | tuple[DistanceLaw, ...] = DIST_RELAY_GW
    traffic: TrafficConfig = TrafficConfig()
    sensor_radio: RadioConfig = RadioConfig(spreading_factor=10)
    relay_radio: RadioConfig = RadioConfig(spreading_factor=7)
    t_rx: float = 30.0
    t_tx: float = 0.3

    def __post_init__(self):
        if self.n < 1:
            raise ConfigInvalidaError("se necesita al menos un sensor", campo="n")
        if self.n_c < 1:
            raise ConfigInvalidaError("se necesita al menos un canal", campo="n_c")
        if self.omega < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="omega")
        if self.r < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="r")
        if not 0 < self.capture_factor < 1:
            raise ConfigInvalidaError("debe estar en (0, 1)", campo="capture_factor")
        if not (self.t_rx > 0 and self.t_tx > 0):
            raise ConfigInvalidaError("t_rx y t_tx deben ser positivos", campo="t_rx")
        for nombre in ("dist_sensor_relay", "dist_relay_gw"):
            leyes = getattr(self, nombre)
            if isinstance(leyes, tuple) and len(leyes) < self.omega:
                raise ConfigInvalidaError(f"hay {len(leyes)} leyes para {self.omega} relays", campo=nombre)

    @classmethod
    def from_scenario(cls, config, **overrides) -> "AnalyticInputs":
        """Arma las entradas a partir de un ScenarioConfig (ver sim_core)."""
        prop = config.propagation
        base = dict(
            n=config.n_sensors,
            n_c=len(config.sensor_radio.channels_hz),
            omega=config.n_relays,
            r=config.redundancy,
            alpha=prop.pathloss_exponent,
            gamma=link_constant(config.sensor_radio.tx_power_dbm, prop),
            psi=prop.psi_mw(config.sensor_radio.spreading_factor),
            gamma_relay=link_constant(config.relay_radio.tx_power_dbm, prop),
            psi_relay=prop.psi_mw(config.relay_radio.spreading_factor),
            capture_factor=1.0 / prop.capture_ratio,
            fading=FadingLaw(prop.nakagami_m),
            traffic=config.traffic,
            sensor_radio=config.sensor_radio,
            relay_radio=config.relay_radio,
            t_rx=config.t_rx,
            t_tx=config.t_tx,
        )
        base.update(overrides)
        return cls(**base)

    def with_r(self, r: int) -> "AnalyticInputs":
        return replace(self, r=r)

    def law(self, enlace: str, relay: int = 0) -> DistanceLaw:
        leyes = {
            "sensor_gw": self.dist_sensor_gw,
            "sensor_relay": self.dist_sensor_relay,
            "relay_gw": self.dist_relay_gw,
        }[enlace]
        return leyes[relay] if isinstance(leyes, tuple) else leyes

    @property
    def frame_duration(self) -> float:
        """t_f(r) = t_fr((r+1)β, s_sen)."""
        return phy_timing.frame_duration((self.r + 1) * self.traffic.measurement_bytes, self.sensor_radio)

    @property
    def duty_cycle(self) -> float:
        return phy_timing.duty_cycle(self.r, self.sensor_radio, self.traffic)

    @property
    def xi(self) -> int:
        """ξ = t_rx / t; la derivación de P_drop exige que sea entero."""
        t = phy_timing.a_fraccion(self.traffic.measurement_period_s)
        cociente = phy_timing.a_fraccion(self.t_rx) / t
        if cociente.denominator != 1 or cociente < 1:
            raise ConfigInvalidaError(
                f"t_rx debe ser un múltiplo entero (>= 1) de t; t_rx/t = {float(cociente)}", campo="t_rx"
            )
        return int(cociente)

    @property
    def p_full_frames(self) -> float:
        """p = 1 - t_f(r)/t."""
        return 1.0 - self.frame_duration / self.traffic.measurement_period_s

    @property
    def capacity(self) -> int:
        return phy_timing.relay_capacity(self.relay_radio, self.traffic, self.t_tx)


@dataclass(frozen=True)
class RelayBreakdown:
    p_rw: float
    p_s_r: float
    p_drop: float
    p_r_g: float
    p_ri: float
    p_i: float
    p_f: float
    v: int


@dataclass(frozen=True)
class MlpBreakdown:
    p_dir: float
    p_i: float
    p_f: float
    relays: tuple[RelayBreakdown, ...]
    mlp: float

    @property
    def prod_p_r(self) -> float:
        return float(np.prod([rel.p_ri for rel in self.relays])) if self.relays else 1.0


# ---------------------------------------------------------
# Cuadratura
# ---------------------------------------------------------

def _con_refinamiento(evaluar: Callable[[int], float], orden: int, rtol: float,
                      atol: float = 1e-10, nombre: str = "") -> float:
    """Evalúa con `orden` y `2·orden` nodos; el segundo valor es el resultado."""
    grueso = evaluar(orden)
    fino = evaluar(2 * orden)
    error = abs(fino - grueso)
    if error > max(rtol * abs(fino), atol):
        raise CuadraturaError(
            f"{nombre}: sin convergencia (|Δ| = {error:.3e} con {orden}/{2 * orden} nodos)"
        )
    logger.debug("%s = %.12g (|Δ| = %.2e)", nombre, fino, error)
    return fino


# ---------------------------------------------------------
# Outages
# ---------------------------------------------------------

@lru_cache(maxsize=4096)
def _outage_fading(dist_law, gamma: float, psi: float, alpha: float,
                   fading: FadingLaw, orden: int, rtol: float) -> float:
    def evaluar(k: int) -> float:
        u, w = dist_law.nodes(k)
        return float(np.sum(w * fading.cdf(u ** alpha * psi / gamma)))

    return _con_refinamiento(evaluar, orden, rtol, nombre="P_f")


def outage_fading(dist_law: DistanceLaw, gamma: float, psi: float, alpha: float,
                  fading: FadingLaw, *, orden: int = ORDEN_DEFAULT, rtol: float = 1e-6) -> float:
    """P_f = ∫ F_A(γ^-1 u^α ψ) f_D(u) du."""
    if psi <= 0:
        return 0.0
    if math.isinf(psi):
        return 1.0
    return _outage_fading(dist_law, float(gamma), float(psi), float(alpha), fading, orden, rtol)


@lru_cache(maxsize=64)
def _inmunidad(dist_law, fading: FadingLaw, alpha: float, capture_factor: float,
               orden: int) -> tuple[np.ndarray, np.ndarray]:
    """
    H[a, w] = 1 - ∫ F_A(c · a · u^α · w^-α) f_D(u) du y los pesos conjuntos
    W[a, w]. κ = λ · H con λ = (n - 1) f(r) / n_c, así que H se reutiliza
    para cualquier n y r.
    """
    u, wu = dist_law.nodes(orden)
    w, ww = dist_law.nodes(orden)
    a, wa = fading.nodes(orden)

    H = np.empty((a.size, w.size))
    for j, wj in enumerate(w):
        cociente = (u / wj) ** alpha
        argumento = capture_factor * a[:, None] * cociente[None, :]
        H[:, j] = 1.0 - fading.cdf(argumento) @ wu

    return H, wa[:, None] * ww[None, :]


def _p_interferencia(lam: float, dist_law, fading: FadingLaw, alpha: float,
                     capture_factor: float, orden: int, rtol: float) -> float:
    def evaluar(k: int) -> float:
        H, W = _inmunidad(dist_law, fading, alpha, capture_factor, k)
        return float(1.0 - np.sum(W * np.exp(-lam * H)))

    return _con_refinamiento(evaluar, orden, rtol, nombre="P_i")


def outage_interference(inputs: AnalyticInputs, link: str = "sensor_gw", relay: int = 0, *,
                        orden: int = ORDEN_DEFAULT, rtol: float = 1e-5) -> float:
    """
    P_i para el enlace sensor->gateway ("sensor_gw") o sensor->relay
    ("sensor_relay"). Los interferentes son los otros n - 1 sensores, activos
    con probabilidad f(r) y en el mismo canal con probabilidad 1/n_c.
    """
    if link not in ("sensor_gw", "sensor_relay"):
        raise ValueError(f"enlace sin interferencia modelada: {link!r}")

    lam = (inputs.n - 1) * inputs.duty_cycle / inputs.n_c
    if lam == 0:
        return 0.0

    return _p_interferencia(lam, inputs.law(link, relay), inputs.fading, float(inputs.alpha),
                            float(inputs.capture_factor), orden, rtol)


# ---------------------------------------------------------
# Camino directo
# ---------------------------------------------------------

def p_direct(p_i: float, p_f: float, r: int) -> float:
    """P_dir = (1 - (1 - P_i)(1 - P_f))^(r+1)."""
    return (1.0 - (1.0 - p_i) * (1.0 - p_f)) ** (r + 1)


def direct_failure(inputs: AnalyticInputs) -> tuple[float, float, float]:
    """(P_dir, P_i, P_f) del enlace sensor->gateway."""
    p_i = outage_interference(inputs, "sensor_gw")
    p_f = outage_fading(inputs.dist_sensor_gw, inputs.gamma, inputs.psi, inputs.alpha, inputs.fading)
    return p_direct(p_i, p_f, inputs.r), p_i, p_f


# ---------------------------------------------------------
# Camino vía relay
# ---------------------------------------------------------

def p_receive_window(t_rx: float, t_tx: float, t_f: float) -> float:
    """
    P_rw = (t_rx - t_f) / (t_rx + t_tx): el inicio de la trama es uniforme en
    el ciclo y la trama entera tiene que caer en la ventana de recepción.
    """
    if t_f > t_rx:
        raise ValueError(f"la trama ({t_f} s) nunca entra en la ventana de recepción ({t_rx} s)")
    return (t_rx - t_f) / (t_rx + t_tx)


def p_drop_exact(n: int, xi: int, p: float, theta: float, v: int) -> float:
    """
    Probabilidad de que el relay descarte una medición recibida por falta
    de lugar en la trama.

    Y = μ + η, μ = n(ξ - 1), η ~ Bin(n, p); Z | Y ~ Bin(Y, 1 - θ); dado Z = z
    se descarta con probabilidad max{z - v, 0} / z.
    """
    mu = n * (xi - 1)
    tope = mu + n
    if v >= tope:
        return 0.0

    total = 0.0
    for y in range(max(mu, v + 1), tope + 1):
        p_y = stats.binom.pmf(y - mu, n, p)
        if p_y == 0.0:
            continue
        z = np.arange(v + 1, y + 1)
        p_z = stats.binom.pmf(z, y, 1.0 - theta)
        total += p_y * float(np.sum((1.0 - v / z) * p_z))

    return total


def p_drop_approx(n: int, xi: int, theta: float, v: int) -> float:
    """Ignora las tramas incompletas: Z ~ Bin(μ + n, 1 - θ)."""
    ensayos = n * xi
    if v >= ensayos:
        return 0.0
    z = np.arange(v + 1, ensayos + 1)
    return float(np.sum((1.0 - v / z) * stats.binom.pmf(z, ensayos, 1.0 - theta)))


def p_via_relay(p_rw: float, p_s_r: float, p_drop: float, p_r_g: float) -> float:
    """P_ri = 1 - P_rw (1 - P_s-ri)(1 - P_drop,ri)(1 - P_ri-g)."""
    return 1.0 - p_rw * (1.0 - p_s_r) * (1.0 - p_drop) * (1.0 - p_r_g)


def relay_failure(inputs: AnalyticInputs, i: int = 0) -> RelayBreakdown:
    t_f = inputs.frame_duration
    p_rw = p_receive_window(inputs.t_rx, inputs.t_tx, t_f)

    ley_sr = inputs.law("sensor_relay", i)
    p_i = outage_interference(inputs, "sensor_relay", i)
    p_f = outage_fading(ley_sr, inputs.gamma, inputs.psi, inputs.alpha, inputs.fading)
    theta = 1.0 - (1.0 - p_i) * (1.0 - p_f)

    v = inputs.capacity
    p_drop = p_drop_exact(inputs.n, inputs.xi, inputs.p_full_frames, theta, v)

    # slots ortogonales entre relays: solo desvanecimiento
    p_r_g = outage_fading(inputs.law("relay_gw", i), inputs.gamma_relay, inputs.psi_relay,
                          inputs.alpha, inputs.fading)

    return RelayBreakdown(
        p_rw=p_rw,
        p_s_r=theta,
        p_drop=p_drop,
        p_r_g=p_r_g,
        p_ri=p_via_relay(p_rw, theta, p_drop, p_r_g),
        p_i=p_i,
        p_f=p_f,
        v=v,
    )


def mlp(inputs: AnalyticInputs) -> MlpBreakdown:
    """MLP = P_dir · Π_{i=1..ω} P_ri, con el desglose completo."""
    p_dir, p_i, p_f = direct_failure(inputs)

    relays = []
    cache: dict[tuple, RelayBreakdown] = {}
    for i in range(inputs.omega):
        clave = (inputs.law("sensor_relay", i), inputs.law("relay_gw", i))
        if clave not in cache:
            cache[clave] = relay_failure(inputs, i)
        relays.append(cache[clave])

    total = p_dir * float(np.prod([rel.p_ri for rel in relays])) if relays else p_dir
    return MlpBreakdown(p_dir=p_dir, p_i=p_i, p_f=p_f, relays=tuple(relays), mlp=total)
