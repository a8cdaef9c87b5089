# src/tasas.py

import math

import numpy as np
import pandas as pd

CLAVES_PUNTO = ["n", "relays", "r", "p_target"]


def calcular_tasas(corridas, min_losses=100):
    """
    Resume las corridas de un mismo punto del barrido.

    mlr_mean es el promedio de las MLR por corrida y mlr_se su error estándar;
    mlr_pooled divide las pérdidas totales por las mediciones totales.
    """

    k = len(corridas)
    generadas = int(corridas["generated"].sum())
    entregadas = int(corridas["delivered"].sum())
    perdidas = generadas - entregadas

    mlr = corridas["mlr"].to_numpy(dtype=float)
    se = float(np.std(mlr, ddof=1) / math.sqrt(k)) if k > 1 else math.nan
    pooled = perdidas / generadas if generadas > 0 else math.nan

    energia = float(corridas["energy_per_frame_j"].iloc[0])
    e_m = energia / (1.0 - pooled) if pooled < 1 else math.inf

    return {
        "runs": k,
        "generated": generadas,
        "delivered": entregadas,
        "lost": perdidas,
        "mlr_mean": float(mlr.mean()),
        "mlr_se": se,
        "mlr_pooled": pooled,
        "e_m": e_m,
        "e_m_infinite": bool(math.isinf(e_m)),
        "energy_per_frame_j": energia,
        "low_confidence": perdidas < min_losses,
    }


def tasas_por_punto(corridas, min_losses=100, claves=None):
    """
    Una fila por punto del barrido, en el orden en que aparecen las corridas.
    """

    claves = [c for c in (claves or CLAVES_PUNTO) if c in corridas.columns]
    resultados = []

    for punto, grupo in corridas.groupby(claves, sort=False, dropna=False):
        punto = punto if isinstance(punto, tuple) else (punto,)
        fila = dict(zip(claves, punto))
        fila["seed"] = int(grupo["seed"].min())
        fila["config_digest"] = grupo["config_digest"].iloc[0]
        fila.update(calcular_tasas(grupo, min_losses=min_losses))
        resultados.append(fila)

    return pd.DataFrame(resultados)
