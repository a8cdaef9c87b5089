"""
oracles.py

Verificaciones Monte Carlo de cada término analítico, independientes de la
cuadratura:

- p_f   : desvanecimiento sensor->gateway (distancia y ganancia sorteadas)
- p_i   : interferencia con un número Poisson(λ) de interferentes, cada uno
          con su distancia y su desvanecimiento, y regla de captura contra
          el más fuerte (channel_model.frame_delivered)
- p_rw  : inicio de trama uniforme en el ciclo del relay
- p_drop: fases uniformes de n sensores dentro de una ventana de recepción

Cada verificación devuelve un z-score (empírico - analítico) / error estándar.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from src import analytic_model
from src.analytic_model import AnalyticInputs
from src.streams import RngStreams

logger = logging.getLogger(__name__)

MUESTRAS_DEFAULT = 1_000_000
VENTANAS_DEFAULT = 200_000
UMBRAL_Z = 3.0
_BLOQUE = 100_000


@dataclass(frozen=True)
class OracleResult:
    check: str
    empirical: float
    std_error: float
    analytic: float
    z: float
    samples: int
    passed: bool


def _resultado(nombre: str, empirico: float, se: float, analitico: float,
               muestras: int, umbral: float) -> OracleResult:
    if se > 0:
        z = (empirico - analitico) / se
    else:
        z = 0.0 if math.isclose(empirico, analitico, abs_tol=1e-12) else math.inf
    logger.info("%s: empírico=%.6g analítico=%.6g z=%.2f", nombre, empirico, analitico, z)
    return OracleResult(nombre, empirico, se, analitico, z, muestras, abs(z) <= umbral)


def _proporcion(exitos: int, total: int) -> tuple[float, float]:
    p = exitos / total
    return p, math.sqrt(max(p * (1.0 - p), 1.0 / total) / total)


# ---------------------------------------------------------
# Verificaciones
# ---------------------------------------------------------

def check_fading(inputs: AnalyticInputs, rng: np.random.Generator,
                 muestras: int = MUESTRAS_DEFAULT, umbral: float = UMBRAL_Z) -> OracleResult:
    ley = inputs.dist_sensor_gw
    d = ley.sample(rng, muestras)
    a = inputs.fading.sample(rng, muestras)
    caidas = int(np.count_nonzero(inputs.gamma * a * d ** (-inputs.alpha) < inputs.psi))

    analitico = analytic_model.outage_fading(ley, inputs.gamma, inputs.psi, inputs.alpha, inputs.fading)
    p, se = _proporcion(caidas, muestras)
    return _resultado("p_f", p, se, analitico, muestras, umbral)


def check_interference(inputs: AnalyticInputs, rng: np.random.Generator,
                       muestras: int = MUESTRAS_DEFAULT, umbral: float = UMBRAL_Z,
                       capture_ratio: float | None = None) -> OracleResult:
    """
    capture_ratio es el umbral físico del receptor simulado; el analítico usa
    inputs.capture_factor, así que alterar uno de los dos tiene que fallar.
    """
    ratio = capture_ratio if capture_ratio is not None else 1.0 / inputs.capture_factor
    ley = inputs.dist_sensor_gw
    lam = (inputs.n - 1) * inputs.duty_cycle / inputs.n_c

    fallas = 0
    restantes = muestras
    while restantes > 0:
        m = min(_BLOQUE, restantes)
        restantes -= m

        deseada = inputs.fading.sample(rng, m) * ley.sample(rng, m) ** (-inputs.alpha)
        k = rng.poisson(lam, size=m)
        total = int(k.sum())
        if total == 0:
            continue

        duenio = np.repeat(np.arange(m), k)
        interferente = inputs.fading.sample(rng, total) * ley.sample(rng, total) ** (-inputs.alpha)
        mas_fuerte = np.zeros(m)
        np.maximum.at(mas_fuerte, duenio, interferente)

        con_interferencia = k > 0
        fallas += int(np.count_nonzero(deseada[con_interferencia] < ratio * mas_fuerte[con_interferencia]))

    analitico = analytic_model.outage_interference(inputs, "sensor_gw")
    p, se = _proporcion(fallas, muestras)
    return _resultado("p_i", p, se, analitico, muestras, umbral)


def check_window(inputs: AnalyticInputs, rng: np.random.Generator,
                 muestras: int = MUESTRAS_DEFAULT, umbral: float = UMBRAL_Z) -> OracleResult:
    ciclo = inputs.t_rx + inputs.t_tx
    t_f = inputs.frame_duration
    inicio = rng.uniform(0.0, 1000.0 * ciclo, size=muestras)
    fase = np.mod(inicio, ciclo)
    dentro = int(np.count_nonzero(fase + t_f <= inputs.t_rx))

    analitico = analytic_model.p_receive_window(inputs.t_rx, inputs.t_tx, t_f)
    p, se = _proporcion(dentro, muestras)
    return _resultado("p_rw", p, se, analitico, muestras, umbral)


def check_drop(inputs: AnalyticInputs, rng: np.random.Generator,
               ventanas: int = VENTANAS_DEFAULT, umbral: float = UMBRAL_Z) -> OracleResult:
    """
    Una muestra por ventana de recepción: cada sensor aporta las tramas que
    caen completas en [0, t_rx) según su fase; cada trama se decodifica con
    probabilidad 1 - θ; se promedia max(Z - v, 0) / Z.
    """
    t = inputs.traffic.measurement_period_s
    t_f = inputs.frame_duration
    xi = inputs.xi
    v = inputs.capacity
    rel = analytic_model.relay_failure(inputs, 0)
    theta = rel.p_s_r

    suma = suma2 = 0.0
    restantes = ventanas
    while restantes > 0:
        m = min(_BLOQUE // max(inputs.n // 10, 1), restantes)
        restantes -= m

        fases = rng.uniform(0.0, t, size=(m, inputs.n))
        y = inputs.n * (xi - 1) + np.count_nonzero(fases + t_f <= t, axis=1)
        z = rng.binomial(y, 1.0 - theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            fraccion = np.where(z > v, (z - v) / np.maximum(z, 1), 0.0)
        suma += float(fraccion.sum())
        suma2 += float((fraccion ** 2).sum())

    media = suma / ventanas
    var = max(suma2 / ventanas - media ** 2, 0.0)
    se = math.sqrt(var / ventanas)

    analitico = rel.p_drop
    return _resultado("p_drop", media, se, analitico, ventanas, umbral)


CHECKS: dict[str, Callable[..., OracleResult]] = {
    "p_f": check_fading,
    "p_i": check_interference,
    "p_rw": check_window,
    "p_drop": check_drop,
}


def run_checks(inputs: AnalyticInputs, checks: list[str] | tuple[str, ...] | None = None, *,
               seed: int = 1, muestras: int = MUESTRAS_DEFAULT, umbral: float = UMBRAL_Z,
               capture_ratio: float | None = None) -> list[OracleResult]:
    """
    Corre las verificaciones pedidas (todas si checks es None), cada una con
    su propio flujo aleatorio.
    """
    nombres = list(CHECKS) if checks is None else list(checks)
    if not nombres:
        raise ValueError("no se seleccionó ninguna verificación")
    desconocidas = [c for c in nombres if c not in CHECKS]
    if desconocidas:
        raise ValueError(f"verificaciones desconocidas: {', '.join(desconocidas)}")

    streams = RngStreams(seed)
    resultados = []
    for nombre in nombres:
        rng = streams[f"oracle/{nombre}"]
        if nombre == "p_i":
            res = check_interference(inputs, rng, muestras, umbral, capture_ratio=capture_ratio)
        elif nombre == "p_drop":
            res = check_drop(inputs, rng, max(muestras // 5, 1), umbral)
        else:
            res = CHECKS[nombre](inputs, rng, muestras, umbral)
        resultados.append(res)

    return resultados
