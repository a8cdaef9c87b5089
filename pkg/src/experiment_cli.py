# src/experiment_cli.py

"""
Interfaz de línea de comandos:

    analyze   MLP analítica con desglose completo por punto (n, ω, r)
    simulate  corridas de simulación, sembrando hasta observar min_losses
              pérdidas por punto (o hasta max_runs)
    allocate  redundancia asignada para cada P_t
    validate  verificaciones Monte Carlo de los términos analíticos

Códigos de salida: 0 éxito, 1 error de uso o de configuración, 2 falla de
validación.
"""

import itertools
import logging
import math
from dataclasses import dataclass, replace
from functools import wraps

import click
import pandas as pd
from joblib import Parallel, delayed

from src import oracles, phy_timing, sim_core
from src.analytic_model import AnalyticInputs, mlp
from src.errores import ErrorSimulador
from src.loader import ExperimentSpec, analysis_overrides, load_config, paper_setup, parse_sweep_option
from src.redundancy_allocator import allocate
from src.salidas import con_esquema, exportar_csv
from src.tasas import tasas_por_punto

logger = logging.getLogger(__name__)

SALIDA_EXITO = 0
SALIDA_CONFIG = 1
SALIDA_VALIDACION = 2

COLUMNAS_ANALISIS = [
    "n", "relays", "r", "p_target", "r_max", "duty_cycle", "frame_duration_s", "bitrate_bps",
    "v", "p_i", "p_f", "p_dir", "p_rw", "p_s_r", "p_drop", "p_r_g", "p_ri", "prod_p_r", "mlp",
    "config_digest",
]

COLUMNAS_RELAYS = [
    "n", "relays", "r", "p_target", "relay", "v", "p_rw", "p_i", "p_f", "p_s_r", "p_drop", "p_r_g", "p_ri",
]

COLUMNAS_SIMULACION = [
    "row_type", "n", "relays", "r", "p_target", "seed", "config_digest", "runs",
    "generated", "delivered", "lost", "mlr", "mlr_se", "mlr_pooled", "e_m", "e_m_infinite",
    "energy_per_frame_j", "delivered_direct_only", "delivered_relay_only", "delivered_both",
    "dropped_at_relay", "mlp", "low_confidence",
]

COLUMNAS_ASIGNACION = [
    "n", "relays", "p_target", "r_max", "r_star", "r_tilde", "mlp_at_r_star", "met_target",
    "config_digest",
]

COLUMNAS_VALIDACION = ["check", "empirical", "std_error", "analytic", "z", "samples", "passed"]

COLUMNAS_TALLY = ["n", "relays", "r", "p_target", "seed", "component", "relay", "empirical",
                  "std_error", "analytic", "z", "samples"]


# ======================================================
#   Armado del experimento
# ======================================================

@dataclass(frozen=True)
class PuntoBarrido:
    n: int
    relays: int
    r: int
    p_target: float | None = None


def _banner(titulo):
    click.echo("\n==============================")
    click.echo(titulo)
    click.echo("==============================\n")


def armar_spec(config=None, sweeps=(), seed=None, runs=None, min_losses=None, max_runs=None,
               targets=()) -> ExperimentSpec:
    """Perfil (archivo o paper_setup) con las opciones de la línea de comandos aplicadas."""
    spec = load_config(config) if config else paper_setup()

    ejes = {}
    for texto in sweeps:
        eje, valores = parse_sweep_option(texto)
        ejes[eje] = valores
    if targets:
        ejes["target"] = tuple(targets)
    if "target" in ejes:
        ejes["mode"] = "allocate"
    if ejes:
        spec = replace(spec, sweep=replace(spec.sweep, **ejes))

    politica = {}
    if seed is not None:
        politica["seed"] = seed
    if runs is not None:
        politica["count"] = runs
        politica["max_runs"] = max(runs, max_runs if max_runs is not None else spec.runs.max_runs)
    elif max_runs is not None:
        politica["max_runs"] = max_runs
    if min_losses is not None:
        politica["min_losses"] = min_losses
    if politica:
        spec = replace(spec, runs=replace(spec.runs, **politica))

    return spec


def config_punto(spec: ExperimentSpec, punto: PuntoBarrido) -> sim_core.ScenarioConfig:
    return spec.scenario.replace(n_sensors=punto.n, n_relays=punto.relays, redundancy=punto.r)


def inputs_punto(spec: ExperimentSpec, config: sim_core.ScenarioConfig, **extra) -> AnalyticInputs:
    return AnalyticInputs.from_scenario(config, **analysis_overrides(spec), **extra)


def asignar(spec: ExperimentSpec, n: int, relays: int, p_target: float):
    config = spec.scenario.replace(n_sensors=n, n_relays=relays, redundancy=0)
    r_max = phy_timing.max_redundancy(config.sensor_radio, config.traffic)
    return allocate(inputs_punto(spec, config), p_target, r_max), r_max, config


def puntos_barrido(spec: ExperimentSpec) -> list[PuntoBarrido]:
    """Puntos en orden de barrido; en modo allocate r es el r̃ asignado."""
    ejes = spec.sweep
    if ejes.mode == "grid":
        return [PuntoBarrido(n, w, r) for n, w, r in itertools.product(ejes.n, ejes.relays, ejes.r)]

    puntos = []
    for n, w, p_t in itertools.product(ejes.n, ejes.relays, ejes.target):
        resultado, _, _ = asignar(spec, n, w, p_t)
        puntos.append(PuntoBarrido(n, w, resultado.r_tilde, p_t))
    return puntos


# ======================================================
#   Trabajo por punto
# ======================================================

def _objetivo(punto: PuntoBarrido) -> float:
    return punto.p_target if punto.p_target is not None else math.nan


def fila_analisis(spec: ExperimentSpec, punto: PuntoBarrido) -> tuple[dict, list[dict]]:
    """Fila del punto (con el relay 0 como resumen) y una fila por relay."""
    config = config_punto(spec, punto)
    inputs = inputs_punto(spec, config)
    desglose = mlp(inputs)

    fila = {
        "n": punto.n,
        "relays": punto.relays,
        "r": punto.r,
        "p_target": _objetivo(punto),
        "r_max": phy_timing.max_redundancy(config.sensor_radio, config.traffic),
        "duty_cycle": inputs.duty_cycle,
        "frame_duration_s": inputs.frame_duration,
        "bitrate_bps": phy_timing.bitrate(config.sensor_radio),
        "p_i": desglose.p_i,
        "p_f": desglose.p_f,
        "p_dir": desglose.p_dir,
        "prod_p_r": desglose.prod_p_r,
        "mlp": desglose.mlp,
        "config_digest": config.digest(),
    }
    por_relay = [
        {"n": punto.n, "relays": punto.relays, "r": punto.r, "p_target": _objetivo(punto), "relay": j,
         "v": rel.v, "p_rw": rel.p_rw, "p_i": rel.p_i, "p_f": rel.p_f, "p_s_r": rel.p_s_r,
         "p_drop": rel.p_drop, "p_r_g": rel.p_r_g, "p_ri": rel.p_ri}
        for j, rel in enumerate(desglose.relays)
    ]
    if por_relay:
        fila.update({k: por_relay[0][k] for k in ("v", "p_rw", "p_s_r", "p_drop", "p_r_g", "p_ri")})
    return fila, por_relay


def _fila_corrida(reporte: sim_core.MetricsReport) -> dict:
    return {
        "row_type": "run",
        "seed": reporte.seed,
        "config_digest": reporte.config_digest,
        "runs": 1,
        "generated": reporte.generated,
        "delivered": reporte.delivered,
        "lost": reporte.lost,
        "mlr": reporte.mlr,
        "mlr_pooled": reporte.mlr,
        "e_m": reporte.e_m,
        "e_m_infinite": reporte.e_m_infinite,
        "energy_per_frame_j": reporte.energy_per_frame_j,
        "delivered_direct_only": reporte.delivered_direct_only,
        "delivered_relay_only": reporte.delivered_relay_only,
        "delivered_both": reporte.delivered_both,
        "dropped_at_relay": reporte.dropped_at_relay,
    }


def correr_punto(config, politica, desglose=None, con_tally=False):
    """
    Corridas con semillas base, base+1, ... hasta completar count corridas y
    min_losses pérdidas, sin pasar de max_runs.
    """
    filas, tallies = [], []
    perdidas = 0
    k = 0

    while k < politica.count or (perdidas < politica.min_losses and k < politica.max_runs):
        reporte = sim_core.simulate(config.replace(seed=politica.seed + k))
        perdidas += reporte.lost
        filas.append(_fila_corrida(reporte))
        if con_tally and desglose is not None:
            tabla = sim_core.tally_vs_analysis(reporte, desglose)
            tabla.insert(0, "seed", reporte.seed)
            tallies.append(tabla)
        k += 1

    return filas, tallies


def simular_barrido(spec: ExperimentSpec, puntos, jobs=1, con_tally=False):
    """Devuelve (tabla de corridas + agregados, tabla de tally)."""
    configs = [config_punto(spec, p) for p in puntos]
    desgloses = [mlp(inputs_punto(spec, c)) for c in configs]

    resultados = Parallel(n_jobs=jobs)(
        delayed(correr_punto)(c, spec.runs, d, con_tally) for c, d in zip(configs, desgloses)
    )

    filas, tallies = [], []
    for punto, desglose, (corridas, tablas) in zip(puntos, desgloses, resultados):
        claves = {"n": punto.n, "relays": punto.relays, "r": punto.r, "p_target": _objetivo(punto)}
        for fila in corridas:
            fila.update(claves, mlp=desglose.mlp)
            filas.append(fila)
        for tabla in tablas:
            for col, valor in reversed(list(claves.items())):
                tabla.insert(0, col, valor)
            tallies.append(tabla)

    df_corridas = pd.DataFrame(filas)
    agregados = tasas_por_punto(df_corridas, min_losses=spec.runs.min_losses)
    agregados = agregados.rename(columns={"mlr_mean": "mlr"})
    agregados["row_type"] = "aggregate"
    agregados["mlp"] = df_corridas.groupby(
        ["n", "relays", "r", "p_target"], sort=False, dropna=False
    )["mlp"].first().to_numpy()

    for fila in agregados.itertuples():
        if fila.low_confidence:
            logger.warning("Punto n=%d ω=%d r=%d: solo %d pérdidas en %d corridas (baja confianza)",
                           fila.n, fila.relays, fila.r, fila.lost, fila.runs)

    tabla = pd.concat([df_corridas, agregados], ignore_index=True)
    tabla_tally = pd.concat(tallies, ignore_index=True) if tallies else pd.DataFrame(columns=COLUMNAS_TALLY)
    return con_esquema(tabla, COLUMNAS_SIMULACION), con_esquema(tabla_tally, COLUMNAS_TALLY)


# ======================================================
#   CLI
# ======================================================

class GrupoCLI(click.Group):
    """Los errores de uso salen con código 1, como los de configuración."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = SALIDA_CONFIG
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = SALIDA_CONFIG
            raise


def con_errores(funcion):
    """Errores de configuración o del modelo -> mensaje y salida 1."""

    @wraps(funcion)
    def envoltura(*args, **kwargs):
        try:
            return funcion(*args, **kwargs)
        except (ErrorSimulador, ValueError, FileNotFoundError) as e:
            click.echo(f"❌ {e}", err=True)
            click.get_current_context().exit(SALIDA_CONFIG)

    return envoltura


def opciones_experimento(funcion):
    opciones = [
        click.option("--config", "config", type=click.Path(dir_okay=False), default=None,
                     help="Archivo JSON de configuración (por defecto, paper_setup)."),
        click.option("--sweep", "sweeps", multiple=True,
                     help="Eje del barrido, ej. n=20,40,60 o relays=0,1,2."),
        click.option("--target", "targets", type=float, multiple=True,
                     help="P_t para el modo de asignación."),
        click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                     help="CSV de salida."),
        click.option("--overwrite", is_flag=True, help="Sobrescribe la salida en vez de versionarla."),
        click.option("--jobs", type=int, default=1, show_default=True,
                     help="Puntos del barrido en paralelo."),
    ]
    for opcion in reversed(opciones):
        funcion = opcion(funcion)
    return funcion


@click.group(cls=GrupoCLI)
@click.option("--verbose", is_flag=True, help="Logging en nivel DEBUG.")
def cli(verbose):
    """Simulador y modelo analítico de redes LoRa con relays."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@opciones_experimento
@con_errores
def analyze(config, sweeps, targets, out, overwrite, jobs):
    """MLP analítica por punto del barrido."""
    _banner("🚀 INICIANDO ANÁLISIS MLP")

    spec = armar_spec(config, sweeps, targets=targets)
    puntos = puntos_barrido(spec)
    click.echo(f"📐 Evaluando {len(puntos)} puntos...")

    resultados = Parallel(n_jobs=jobs)(delayed(fila_analisis)(spec, p) for p in puntos)
    tabla = con_esquema(pd.DataFrame([fila for fila, _ in resultados]), COLUMNAS_ANALISIS)

    destino = exportar_csv(tabla, out or "output/analyze.csv", sobrescribir=overwrite)
    click.echo(f"✔ Tabla analítica exportada:\n   {destino}")

    filas_relays = [f for _, por_relay in resultados for f in por_relay]
    if filas_relays:
        base = destino[:-4] if destino.endswith(".csv") else destino
        tabla_relays = con_esquema(pd.DataFrame(filas_relays), COLUMNAS_RELAYS)
        destino_relays = exportar_csv(tabla_relays, f"{base}_relays.csv", sobrescribir=overwrite)
        click.echo(f"✔ Desglose por relay exportado:\n   {destino_relays}")


@cli.command()
@opciones_experimento
@click.option("--seed", type=int, default=None, help="Semilla base.")
@click.option("--runs", type=int, default=None, help="Corridas mínimas por punto.")
@click.option("--min-losses", type=int, default=None, help="Pérdidas a observar por punto (100).")
@click.option("--max-runs", type=int, default=None, help="Tope de corridas por punto.")
@click.option("--tally", is_flag=True, help="Exporta también la comparación por componente.")
@con_errores
def simulate(config, sweeps, targets, out, overwrite, jobs, seed, runs, min_losses, max_runs, tally):
    """Corridas de simulación con agregados por punto."""
    _banner("🚀 INICIANDO SIMULACIÓN")

    spec = armar_spec(config, sweeps, seed, runs, min_losses, max_runs, targets)
    puntos = puntos_barrido(spec)
    click.echo(f"🛰 Simulando {len(puntos)} puntos (semilla base {spec.runs.seed})...")

    tabla, tabla_tally = simular_barrido(spec, puntos, jobs=jobs, con_tally=tally)

    destino = exportar_csv(tabla, out or "output/simulate.csv", sobrescribir=overwrite)
    click.echo(f"✔ Corridas y agregados exportados:\n   {destino}")

    bajas = tabla[(tabla["row_type"] == "aggregate") & (tabla["low_confidence"] == True)]  # noqa: E712
    if len(bajas):
        click.echo(f"⚠ {len(bajas)} punto(s) con menos de {spec.runs.min_losses} pérdidas observadas")

    if tally:
        base = destino[:-4] if destino.endswith(".csv") else destino
        destino_tally = exportar_csv(tabla_tally, f"{base}_tally.csv", sobrescribir=overwrite)
        click.echo(f"✔ Comparación con el análisis exportada:\n   {destino_tally}")


@cli.command(name="allocate")
@opciones_experimento
@click.option("--simulate", "con_simulacion", is_flag=True, help="Simula cada punto con el r̃ asignado.")
@con_errores
def allocate_cmd(config, sweeps, targets, out, overwrite, jobs, con_simulacion):
    """Redundancia asignada por punto (n, ω, P_t)."""
    _banner("🚀 INICIANDO ASIGNACIÓN DE REDUNDANCIA")

    spec = armar_spec(config, sweeps, targets=targets)
    objetivos = spec.sweep.target
    if not objetivos:
        raise click.UsageError("se necesita al menos un --target (o sweep.target en la configuración)")

    filas = []
    for n, w, p_t in itertools.product(spec.sweep.n, spec.sweep.relays, objetivos):
        res, r_max, config_base = asignar(spec, n, w, p_t)
        click.echo(f"   n={n} ω={w} P_t={p_t:g} → r*={res.r_star} r̃={res.r_tilde} "
                   f"MLP={res.mlp_at_r_star:.3e} {'✔' if res.met_target else '✘'}")
        filas.append({
            "n": n,
            "relays": w,
            "p_target": p_t,
            "r_max": r_max,
            "r_star": res.r_star,
            "r_tilde": res.r_tilde,
            "mlp_at_r_star": res.mlp_at_r_star,
            "met_target": res.met_target,
            "config_digest": config_base.digest(),
        })

    tabla = con_esquema(pd.DataFrame(filas), COLUMNAS_ASIGNACION)
    destino = exportar_csv(tabla, out or "output/allocate.csv", sobrescribir=overwrite)
    click.echo(f"✔ Asignaciones exportadas:\n   {destino}")

    if con_simulacion:
        spec = replace(spec, sweep=replace(spec.sweep, mode="allocate"))
        tabla_sim, _ = simular_barrido(spec, puntos_barrido(spec), jobs=jobs)
        base = destino[:-4] if destino.endswith(".csv") else destino
        destino_sim = exportar_csv(tabla_sim, f"{base}_simulate.csv", sobrescribir=overwrite)
        click.echo(f"✔ Simulación con r̃ exportada:\n   {destino_sim}")


@cli.command()
@click.option("--config", "config", type=click.Path(dir_okay=False), default=None,
              help="Archivo JSON de configuración (por defecto, paper_setup).")
@click.option("--checks", default=",".join(oracles.CHECKS), show_default=True,
              help="Verificaciones separadas por coma.")
@click.option("--n", "n", type=int, default=120, show_default=True, help="Sensores del escenario verificado.")
@click.option("--r", "r", type=int, default=None, help="Redundancia (por defecto la del perfil).")
@click.option("--capture-factor", type=float, default=None,
              help="Factor de captura del modelo analítico (el receptor simulado no cambia).")
@click.option("--samples", type=int, default=oracles.MUESTRAS_DEFAULT, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None, help="CSV de salida.")
@click.option("--overwrite", is_flag=True)
@con_errores
def validate(config, checks, n, r, capture_factor, samples, seed, out, overwrite):
    """Verificaciones Monte Carlo; sale con 2 si algún |z| > 3."""
    _banner("🚀 INICIANDO VERIFICACIONES")

    nombres = [c.strip() for c in checks.split(",") if c.strip()]
    if not nombres:
        raise click.UsageError("no se seleccionó ninguna verificación")

    spec = armar_spec(config)
    escenario = spec.scenario
    extra = {"n": n, "omega": max(escenario.n_relays, 1)}
    if r is not None:
        extra["r"] = r
    if capture_factor is not None:
        extra["capture_factor"] = capture_factor
    inputs = inputs_punto(spec, escenario, **extra)

    resultados = oracles.run_checks(inputs, nombres, seed=seed, muestras=samples,
                                    capture_ratio=escenario.propagation.capture_ratio)

    for res in resultados:
        marca = "✔" if res.passed else "✘"
        click.echo(f"   {marca} {res.check:<7} empírico={res.empirical:.6g} "
                   f"analítico={res.analytic:.6g} z={res.z:+.2f}")

    if out:
        tabla = con_esquema(pd.DataFrame([vars(res) for res in resultados]), COLUMNAS_VALIDACION)
        destino = exportar_csv(tabla, out, sobrescribir=overwrite)
        click.echo(f"✔ Resultados exportados:\n   {destino}")

    fallidas = [res.check for res in resultados if not res.passed]
    if fallidas:
        click.echo(f"❌ Fallaron: {', '.join(fallidas)}", err=True)
        click.get_current_context().exit(SALIDA_VALIDACION)

    click.echo("🎉 Todas las verificaciones pasaron")
