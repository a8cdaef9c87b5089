"""
Carga y normalización de la configuración de experimentos.

Funciones públicas:
- load_config(path): lee un JSON (schema_version 1) y devuelve un ExperimentSpec.
- parse_config(datos): lo mismo a partir de un dict ya leído.
- paper_setup(): el perfil por defecto sin tocar disco.
- parse_sweep_option(texto): interpreta "--sweep n=20,40,60".
- analysis_overrides(spec): leyes de distancia para AnalyticInputs.from_scenario.

Notas:
- Las claves se normalizan (strip + minúsculas) antes de validar.
- Los errores de sintaxis informan línea y columna; los de contenido, la
  ruta con puntos del campo (ej. "scenario.traffic.delay_max_s").
- Solo se arma la configuración: las corridas quedan en sim_core.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from src.analytic_model import DistanceLaw, distance_law_from_dict
from src.channel_model import VELOCIDAD_LUZ, PropagationParams
from src.errores import ConfigInvalidaError
from src.phy_timing import RadioConfig, TrafficConfig
from src.sim_core import PlacementBox, ScenarioConfig

SCHEMA_VERSION = 1
DEFAULT_ENCODING = "utf-8"

SECCIONES = {"schema_version", "profile", "scenario", "analysis", "sweep", "runs"}
EJES_SWEEP = {"n": "n", "relays": "relays", "omega": "relays", "r": "r", "target": "target"}
LEYES = ("dist_sensor_gw", "dist_sensor_relay", "dist_relay_gw")


# ---------------------------------------------------------
# Tipos
# ---------------------------------------------------------

@dataclass(frozen=True)
class SweepAxes:
    """
    Ejes del barrido. mode="grid" recorre n x relays x r; mode="allocate"
    reemplaza el eje r por la redundancia asignada para cada P_t.
    """
    n: tuple[int, ...] = (60,)
    relays: tuple[int, ...] = (0, 1)
    r: tuple[int, ...] = (3,)
    target: tuple[float, ...] = ()
    mode: str = "grid"

    def __post_init__(self):
        for eje in ("n", "relays"):
            if not getattr(self, eje):
                raise ConfigInvalidaError("el eje no puede estar vacío", campo=eje)
        if self.mode not in ("grid", "allocate"):
            raise ConfigInvalidaError("debe ser 'grid' o 'allocate'", campo="mode")
        if self.mode == "grid" and not self.r:
            raise ConfigInvalidaError("el eje no puede estar vacío", campo="r")
        if self.mode == "allocate" and not self.target:
            raise ConfigInvalidaError("el modo allocate necesita al menos un P_t", campo="target")
        if any(not 0 < p <= 1 for p in self.target):
            raise ConfigInvalidaError("P_t debe estar en (0, 1]", campo="target")


@dataclass(frozen=True)
class RunPolicy:
    """Semillas: base + corridas; se sigue sembrando hasta min_losses o max_runs."""
    seed: int = 1
    count: int = 1
    min_losses: int = 100
    max_runs: int = 50

    def __post_init__(self):
        if self.count < 1:
            raise ConfigInvalidaError("se necesita al menos una corrida", campo="count")
        if self.min_losses < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="min_losses")
        if self.max_runs < self.count:
            raise ConfigInvalidaError("debe ser >= runs.count", campo="max_runs")


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    analysis: dict[str, DistanceLaw | tuple[DistanceLaw, ...]] = field(default_factory=dict)
    sweep: SweepAxes = SweepAxes()
    runs: RunPolicy = RunPolicy()
    profile: str = "paper_setup"


# ---------------------------------------------------------
# Lectura
# ---------------------------------------------------------

def _normalizar_claves(datos):
    """Claves en minúsculas y sin espacios externos, recursivamente."""
    if isinstance(datos, dict):
        return {str(k).strip().lower(): _normalizar_claves(v) for k, v in datos.items()}
    if isinstance(datos, list):
        return [_normalizar_claves(v) for v in datos]
    return datos


def _construir(tipo, datos: dict, ruta: str, **extra):
    """Arma un dataclass rechazando campos desconocidos y anteponiendo la ruta a los errores."""
    if not isinstance(datos, dict):
        raise ConfigInvalidaError("se esperaba un objeto", campo=ruta)

    validos = {f.name for f in fields(tipo)}
    desconocidos = sorted(set(datos) - validos)
    if desconocidos:
        raise ConfigInvalidaError("campo desconocido", campo=f"{ruta}.{desconocidos[0]}")

    try:
        return tipo(**datos, **extra)
    except ConfigInvalidaError as e:
        campo = f"{ruta}.{e.campo}" if e.campo else ruta
        raise ConfigInvalidaError(e.mensaje, campo=campo) from None
    except (TypeError, ValueError) as e:
        raise ConfigInvalidaError(str(e), campo=ruta) from None


def _caja(valor, ruta: str) -> PlacementBox:
    if isinstance(valor, list):
        if len(valor) != 4:
            raise ConfigInvalidaError("se esperaban [x_min, x_max, y_min, y_max]", campo=ruta)
        return _construir(PlacementBox, dict(zip(("x_min", "x_max", "y_min", "y_max"), valor)), ruta)
    return _construir(PlacementBox, valor, ruta)


def _radio(valor: dict, ruta: str) -> RadioConfig:
    datos = dict(valor)
    if "channels_hz" in datos:
        datos["channels_hz"] = tuple(datos["channels_hz"])
    return _construir(RadioConfig, datos, ruta)


def _propagacion(valor: dict, ruta: str) -> PropagationParams:
    datos = dict(valor)
    if "carrier_hz" in datos:
        portadora = datos.pop("carrier_hz")
        if not isinstance(portadora, (int, float)) or portadora <= 0:
            raise ConfigInvalidaError("debe ser positiva", campo=f"{ruta}.carrier_hz")
        datos["wavelength_m"] = VELOCIDAD_LUZ / portadora
    return _construir(PropagationParams, datos, ruta)


def _escenario(datos: dict) -> ScenarioConfig:
    datos = dict(datos)
    ruta = "scenario"
    if "sensor_box" in datos:
        datos["sensor_box"] = _caja(datos["sensor_box"], f"{ruta}.sensor_box")
    if "relay_box" in datos:
        datos["relay_box"] = _caja(datos["relay_box"], f"{ruta}.relay_box")
    for nombre in ("sensor_radio", "relay_radio"):
        if nombre in datos:
            datos[nombre] = _radio(datos[nombre], f"{ruta}.{nombre}")
    if "traffic" in datos:
        datos["traffic"] = _construir(TrafficConfig, datos["traffic"], f"{ruta}.traffic")
    if "propagation" in datos:
        datos["propagation"] = _propagacion(datos["propagation"], f"{ruta}.propagation")
    return _construir(ScenarioConfig, datos, ruta)


def _analisis(datos: dict) -> dict:
    if not isinstance(datos, dict):
        raise ConfigInvalidaError("se esperaba un objeto", campo="analysis")

    leyes = {}
    for nombre, valor in datos.items():
        ruta = f"analysis.{nombre}"
        if nombre not in LEYES:
            raise ConfigInvalidaError("campo desconocido", campo=ruta)
        if nombre == "dist_sensor_gw" and isinstance(valor, list):
            raise ConfigInvalidaError("el enlace sensor-gateway admite una sola ley", campo=ruta)
        try:
            if isinstance(valor, list):
                leyes[nombre] = tuple(distance_law_from_dict(v) for v in valor)
            else:
                leyes[nombre] = distance_law_from_dict(valor)
        except ConfigInvalidaError as e:
            raise ConfigInvalidaError(e.mensaje, campo=ruta) from None
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigInvalidaError(f"ley de distancia inválida ({e})", campo=ruta) from None
    return leyes


def _sweep(datos: dict) -> SweepAxes:
    if not isinstance(datos, dict):
        raise ConfigInvalidaError("se esperaba un objeto", campo="sweep")

    ejes = {}
    for clave, valor in datos.items():
        if clave == "mode":
            ejes["mode"] = str(valor).strip().lower()
            continue
        if clave not in EJES_SWEEP:
            raise ConfigInvalidaError("eje desconocido", campo=f"sweep.{clave}")
        valores = valor if isinstance(valor, list) else [valor]
        ejes[EJES_SWEEP[clave]] = tuple(valores)

    return _construir(SweepAxes, ejes, "sweep")


def parse_config(datos: dict) -> ExperimentSpec:
    """Valida un documento ya decodificado y arma el ExperimentSpec."""
    if not isinstance(datos, dict):
        raise ConfigInvalidaError("el documento debe ser un objeto JSON")
    datos = _normalizar_claves(datos)

    desconocidas = sorted(set(datos) - SECCIONES)
    if desconocidas:
        raise ConfigInvalidaError("sección desconocida", campo=desconocidas[0])

    version = datos.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigInvalidaError(f"se esperaba {SCHEMA_VERSION}, se encontró {version!r}",
                                  campo="schema_version")

    return ExperimentSpec(
        scenario=_escenario(datos.get("scenario", {})),
        analysis=_analisis(datos.get("analysis", {})),
        sweep=_sweep(datos["sweep"]) if "sweep" in datos else SweepAxes(),
        runs=_construir(RunPolicy, datos.get("runs", {}), "runs"),
        profile=str(datos.get("profile", "custom")),
    )


def load_config(path: str | Path) -> ExperimentSpec:
    """Lee el archivo JSON de configuración."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"No se encontró el archivo de configuración: {path.resolve()}")

    texto = path.read_text(encoding=DEFAULT_ENCODING)
    try:
        datos = json.loads(texto)
    except json.JSONDecodeError as e:
        raise ConfigInvalidaError(e.msg, linea=e.lineno, columna=e.colno) from None

    return parse_config(datos)


def paper_setup() -> ExperimentSpec:
    """Perfil por defecto (el mismo que data/paper_setup.json)."""
    return ExperimentSpec()


# ---------------------------------------------------------
# Auxiliares para la CLI
# ---------------------------------------------------------

def parse_sweep_option(texto: str) -> tuple[str, tuple]:
    """'n=20,40,60' -> ('n', (20, 40, 60)); 'target=0.01' -> ('target', (0.01,))."""
    if "=" not in texto:
        raise ConfigInvalidaError(f"se esperaba eje=valores, se recibió {texto!r}", campo="--sweep")

    clave, _, valores = texto.partition("=")
    clave = clave.strip().lower()
    if clave not in EJES_SWEEP:
        raise ConfigInvalidaError(f"eje desconocido: {clave!r}", campo="--sweep")

    eje = EJES_SWEEP[clave]
    conversor = float if eje == "target" else int
    try:
        numeros = tuple(conversor(v) for v in valores.split(",") if v.strip())
    except ValueError:
        raise ConfigInvalidaError(f"valores inválidos: {valores!r}", campo=f"--sweep {clave}") from None

    if not numeros:
        raise ConfigInvalidaError("el eje no puede estar vacío", campo=f"--sweep {clave}")
    return eje, numeros


def analysis_overrides(spec: ExperimentSpec) -> dict:
    """Leyes de distancia configuradas, listas para AnalyticInputs.from_scenario."""
    return dict(spec.analysis)
