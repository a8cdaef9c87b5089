"""
redundancy_allocator.py

Asignación de redundancia a partir de la MLP analítica:

    Ω  = {r <= r_max : MLP(r) <= P_t}
    r* = min Ω             si Ω no está vacío
       = argmin_r MLP(r)   si no (empates -> el r más chico)
    r̃  = max{r <= r_max : t_f(r) = t_f(r*)}

r̃ aprovecha las mesetas de la duración de trama: mismas mediciones
pasadas extra sin costo de tiempo en aire.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from src import analytic_model, phy_timing
from src.analytic_model import AnalyticInputs, MlpBreakdown

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AllocationResult:
    r_star: int
    r_tilde: int
    mlp_at_r_star: float
    met_target: bool
    mlp_by_r: tuple[float, ...] = ()


def allocate(inputs: AnalyticInputs, p_target: float, r_max: int,
             mlp_fn: Callable[[AnalyticInputs], MlpBreakdown] = analytic_model.mlp) -> AllocationResult:
    """
    Evalúa la MLP para todo r en 0..r_max (no se asume monotonía: f(r)
    realimenta P_i) y aplica el procedimiento de asignación.
    """
    if r_max < 0:
        raise ValueError("r_max no puede ser negativo")
    if not 0 < p_target <= 1:
        raise ValueError("p_target debe estar en (0, 1]")

    valores = [mlp_fn(inputs.with_r(r)).mlp for r in range(r_max + 1)]
    omega = [r for r, valor in enumerate(valores) if valor <= p_target]

    if omega:
        r_star = min(omega)
    else:
        # min() sobre (valor, r) desempata por el r más chico
        _, r_star = min((valor, r) for r, valor in enumerate(valores))

    beta = inputs.traffic.measurement_bytes
    t_star = phy_timing.frame_duration_exact((r_star + 1) * beta, inputs.sensor_radio)
    r_tilde = max(
        r for r in range(r_star, r_max + 1)
        if phy_timing.frame_duration_exact((r + 1) * beta, inputs.sensor_radio) == t_star
    )

    logger.info("Asignación P_t=%g: r*=%d, r̃=%d, meta %s", p_target, r_star, r_tilde,
                "cumplida" if omega else "NO cumplida")

    return AllocationResult(
        r_star=r_star,
        r_tilde=r_tilde,
        mlp_at_r_star=valores[r_star],
        met_target=bool(omega),
        mlp_by_r=tuple(valores),
    )
