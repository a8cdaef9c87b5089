"""
sim_core.py

Simulación de eventos discretos (simpy) del sistema completo:

- n sensores Clase A, periódicos (período t, fase uniforme en [0, t)), que
  envían en cada trama la medición actual y las r anteriores, en un canal
  elegido al azar;
- ω relays Clase C que alternan ventana de recepción (t_rx) y de
  transmisión (t_tx), guardan la medición actual de cada trama escuchada
  completa dentro de la ventana y la reenvían (hasta v por trama, el resto
  se descarta al azar);
- un gateway en el origen que deduplica por (sensor, seq) y solo acepta
  mediciones con antigüedad <= d_max.

Las colisiones se resuelven con channel_model en cada receptor. El ciclo
del relay i está desplazado i·t_tx, así las ventanas de transmisión no se
pisan.

Métricas (sobre las mediciones generadas en [warmup, fin - d_max]):

    MLR = 1 - entregadas / generadas
    E_m = energía por trama / (1 - MLR)
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from collections import defaultdict, deque
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import pandas as pd
import simpy

from src import channel_model, phy_timing
from src.channel_model import PropagationParams, dbm_a_mw, link_constant
from src.errores import ConfigInvalidaError, InvarianteViolado, UbicacionError
from src.phy_timing import RadioConfig, TrafficConfig, a_fraccion
from src.streams import RngStreams

logger = logging.getLogger(__name__)

INTENTOS_UBICACION = 100_000
VENTANA_DUTY_S = 3600.0

DIRECTO = 1  # bit del camino directo; el relay j usa el bit 1 + j


# ---------------------------------------------------------
# Configuración del escenario
# ---------------------------------------------------------

@dataclass(frozen=True)
class PlacementBox:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise ConfigInvalidaError("caja con límites invertidos", campo="placement")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        x = rng.uniform(self.x_min, self.x_max, size=size)
        y = rng.uniform(self.y_min, self.y_max, size=size)
        return np.column_stack([x, y])

    def contains(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        return ((xy[:, 0] >= self.x_min) & (xy[:, 0] <= self.x_max)
                & (xy[:, 1] >= self.y_min) & (xy[:, 1] <= self.y_max))


def _canonico(valor):
    """Números como float y claves como texto: 4 y 4.0 dan la misma huella."""
    if isinstance(valor, dict):
        return {str(k): _canonico(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_canonico(v) for v in valor]
    if isinstance(valor, (int, float)) and not isinstance(valor, bool):
        return float(valor)
    return valor


@dataclass(frozen=True)
class ScenarioConfig:
    n_sensors: int = 60
    n_relays: int = 0
    redundancy: int = 3
    sensor_box: PlacementBox = PlacementBox(30.0, 42.0, 30.0, 42.0)
    relay_box: PlacementBox = PlacementBox(10.0, 20.0, 10.0, 20.0)
    relay_min_separation_m: float = 1.0
    sensor_radio: RadioConfig = RadioConfig(spreading_factor=10)
    relay_radio: RadioConfig = RadioConfig(spreading_factor=7)
    traffic: TrafficConfig = TrafficConfig()
    t_rx: float = 30.0
    t_tx: float = 0.3
    propagation: PropagationParams = field(default_factory=PropagationParams)
    run_length_s: float = 3 * 3600.0
    warmup_s: float | None = None
    seed: int = 1

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ConfigInvalidaError("se necesita al menos un sensor", campo="n_sensors")
        if self.n_relays < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="n_relays")
        if self.redundancy < 0:
            raise ConfigInvalidaError("no puede ser negativa", campo="redundancy")
        if not (self.t_rx > 0 and self.t_tx > 0):
            raise ConfigInvalidaError("t_rx y t_tx deben ser positivos", campo="t_rx")

        limite = a_fraccion(self.traffic.duty_cycle_limit)
        if a_fraccion(self.t_tx) / (a_fraccion(self.t_rx) + a_fraccion(self.t_tx)) > limite:
            raise ConfigInvalidaError("t_tx/(t_rx + t_tx) supera el límite de ciclo de trabajo", campo="t_tx")

        r_max = phy_timing.max_redundancy(self.sensor_radio, self.traffic)
        if self.redundancy > r_max:
            raise ConfigInvalidaError(f"r = {self.redundancy} supera r_max = {r_max}", campo="redundancy")

        if self.n_relays > 0:
            if self.n_relays * self.t_tx > self.t_rx + self.t_tx:
                raise ConfigInvalidaError("no entran ω ventanas de transmisión disjuntas en un ciclo",
                                          campo="n_relays")
            if self.relay_radio.spreading_factor == self.sensor_radio.spreading_factor:
                raise ConfigInvalidaError("relays y sensores deben usar SF distintos", campo="relay_radio")
            phy_timing.relay_capacity(self.relay_radio, self.traffic, self.t_tx)

        self.propagation.psi_mw(self.sensor_radio.spreading_factor)
        self.propagation.psi_mw(self.relay_radio.spreading_factor)

        if self.warmup_s is not None and self.warmup_s < 0:
            raise ConfigInvalidaError("no puede ser negativo", campo="warmup_s")
        ventana = self.run_length_s - self.traffic.delay_max_s - self.warmup
        if ventana < self.traffic.measurement_period_s:
            raise ConfigInvalidaError(
                f"la corrida es demasiado corta: quedan {ventana:.1f} s de ventana de métricas",
                campo="run_length_s",
            )

    @property
    def cycle_s(self) -> float:
        return self.t_rx + self.t_tx

    @property
    def warmup(self) -> float:
        """d_max + un ciclo de relay, salvo que se fije warmup_s."""
        if self.warmup_s is not None:
            return self.warmup_s
        return self.traffic.delay_max_s + self.cycle_s

    def digest(self) -> str:
        """Huella corta de la configuración (incluye la semilla)."""
        crudo = json.dumps(_canonico(asdict(self)), sort_keys=True, default=str)
        return hashlib.sha256(crudo.encode("utf-8")).hexdigest()[:16]

    def replace(self, **cambios) -> "ScenarioConfig":
        return replace(self, **cambios)


@dataclass(frozen=True, eq=False)
class Scenario:
    config: ScenarioConfig
    sensor_xy: np.ndarray
    relay_xy: np.ndarray
    phases: np.ndarray
    relay_offsets: np.ndarray
    dist_sensor_gw: np.ndarray
    dist_sensor_relay: np.ndarray
    dist_relay_gw: np.ndarray


# ---------------------------------------------------------
# Estado de la simulación
# ---------------------------------------------------------

@dataclass(eq=False)
class Transmission:
    sender_id: int
    kind: str
    channel: int
    spreading_factor: int
    start_s: float
    duration_s: float
    contents: tuple[tuple[int, int], ...]
    rx_power_mw: np.ndarray
    interferers: list["Transmission"] = field(default_factory=list)

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s


@dataclass
class RelayState:
    relay_id: int
    offset_s: float
    buffer: dict[tuple[int, int], float] = field(default_factory=dict)
    cycle: int = 0

    def in_rx_window(self, inicio: float, fin: float, ciclo_s: float, t_rx: float) -> bool:
        """La trama entera tiene que caer dentro de una ventana de recepción."""
        if inicio < self.offset_s:
            return False
        c = math.floor((inicio - self.offset_s) / ciclo_s)
        return fin <= self.offset_s + c * ciclo_s + t_rx


@dataclass
class RelayCounters:
    frames_seen: int = 0
    frames_in_window: int = 0
    frames_decoded: int = 0
    buffered: int = 0
    dropped: int = 0
    frames_sent: int = 0
    frames_delivered: int = 0
    delivered_measurements: int = 0


@dataclass(frozen=True)
class MetricsReport:
    mlr: float
    e_m: float
    e_m_infinite: bool
    energy_per_frame_j: float
    generated: int
    delivered: int
    delivered_direct: int
    delivered_direct_only: int
    delivered_relay_only: int
    delivered_both: int
    dropped_at_relay: int
    sensor_frames: int
    sensor_frames_decoded_gw: int
    relays: tuple[RelayCounters, ...]
    seed: int
    config_digest: str

    @property
    def lost(self) -> int:
        return self.generated - self.delivered


class MonitorDutyCycle:
    """
    Tiempo en aire por nodo en la hora que termina con la trama que arranca
    (incluida). Falla si supera límite · 3600 s.
    """

    def __init__(self, limite: float, ventana_s: float = VENTANA_DUTY_S):
        self.tope = limite * ventana_s
        self.ventana_s = ventana_s
        self.historial: dict[str, deque] = defaultdict(deque)
        self.acumulado: dict[str, float] = defaultdict(float)

    def registrar(self, nodo: str, inicio: float, duracion: float):
        h = self.historial[nodo]
        while h and h[0][0] <= inicio - self.ventana_s + 1e-9:
            _, d = h.popleft()
            self.acumulado[nodo] -= d

        h.append((inicio, duracion))
        self.acumulado[nodo] += duracion

        if self.acumulado[nodo] > self.tope + 1e-6:
            raise InvarianteViolado(
                f"{nodo}: {self.acumulado[nodo]:.3f} s en aire en la última hora (tope {self.tope:.3f} s)"
            )


# ---------------------------------------------------------
# Construcción del escenario
# ---------------------------------------------------------

def _ubicar_relays(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    puestos: list[np.ndarray] = []
    intentos = 0

    while len(puestos) < config.n_relays:
        if intentos >= INTENTOS_UBICACION:
            raise UbicacionError(
                f"no se pudieron ubicar {config.n_relays} relays separados "
                f"{config.relay_min_separation_m} m tras {INTENTOS_UBICACION} intentos"
            )
        intentos += 1

        candidato = config.relay_box.sample(rng, 1)[0]
        if all(np.hypot(*(candidato - p)) >= config.relay_min_separation_m for p in puestos):
            puestos.append(candidato)

    return np.array(puestos).reshape(config.n_relays, 2)


def build_scenario(config: ScenarioConfig, rng: RngStreams | None = None) -> Scenario:
    """Posiciones, fases y desfasajes de relays; determinístico dada la semilla."""
    streams = rng if rng is not None else RngStreams(config.seed)
    n, omega = config.n_sensors, config.n_relays

    sensor_xy = config.sensor_box.sample(streams["placement/sensors"], n)
    relay_xy = _ubicar_relays(config, streams["placement/relays"])
    phases = streams["phases"].uniform(0.0, config.traffic.measurement_period_s, size=n)
    offsets = np.arange(omega) * config.t_tx

    dist_sensor_gw = np.hypot(sensor_xy[:, 0], sensor_xy[:, 1])
    dist_relay_gw = np.hypot(relay_xy[:, 0], relay_xy[:, 1])
    dist_sensor_relay = np.hypot(
        sensor_xy[:, None, 0] - relay_xy[None, :, 0],
        sensor_xy[:, None, 1] - relay_xy[None, :, 1],
    )

    return Scenario(
        config=config,
        sensor_xy=sensor_xy,
        relay_xy=relay_xy,
        phases=phases,
        relay_offsets=offsets,
        dist_sensor_gw=dist_sensor_gw,
        dist_sensor_relay=dist_sensor_relay.reshape(n, omega),
        dist_relay_gw=dist_relay_gw,
    )


# ---------------------------------------------------------
# Motor
# ---------------------------------------------------------

class _Simulacion:

    def __init__(self, scenario: Scenario):
        cfg = scenario.config
        self.scenario = scenario
        self.cfg = cfg
        self.env = simpy.Environment()
        self.streams = RngStreams(cfg.seed)

        prop = cfg.propagation
        self.alpha = prop.pathloss_exponent
        self.m = prop.nakagami_m
        self.capture_ratio = prop.capture_ratio
        self.psi = {
            cfg.sensor_radio.spreading_factor: prop.psi_mw(cfg.sensor_radio.spreading_factor),
            cfg.relay_radio.spreading_factor: prop.psi_mw(cfg.relay_radio.spreading_factor),
        }
        self.gamma_sensor = link_constant(cfg.sensor_radio.tx_power_dbm, prop)
        self.gamma_relay = link_constant(cfg.relay_radio.tx_power_dbm, prop)

        omega = cfg.n_relays
        self.n_receptores = 1 + omega
        self.dist_rx = np.column_stack([scenario.dist_sensor_gw, scenario.dist_sensor_relay])
        self.fading_sensores = [self.streams["fading/gateway"]] + [
            self.streams[f"fading/relay-{j}"] for j in range(omega)
        ]
        self.fading_relays = [self.streams[f"fading/relay-{j}-gateway"] for j in range(omega)]
        self.canal_sensores = self.streams["channels/sensors"]
        self.canal_relays = [self.streams[f"channels/relay-{j}"] for j in range(omega)]
        self.descarte = [self.streams[f"discard/relay-{j}"] for j in range(omega)]

        beta = cfg.traffic.measurement_bytes
        self.t_sensor = [
            phy_timing.frame_duration(q * beta, cfg.sensor_radio) for q in range(cfg.redundancy + 2)
        ]
        self.v = phy_timing.relay_capacity(cfg.relay_radio, cfg.traffic, cfg.t_tx) if omega else 0
        self._t_relay: dict[int, float] = {}

        self.relays = [RelayState(j, float(scenario.relay_offsets[j])) for j in range(omega)]
        self.contadores = [RelayCounters() for _ in range(omega)]
        self.monitor = MonitorDutyCycle(cfg.traffic.duty_cycle_limit)

        self.en_aire: list[Transmission] = []
        self.entregas: dict[tuple[int, int], int] = {}
        self.tramas_sensor = 0
        self.tramas_sensor_gw = 0

        self.inicio_metrica = cfg.warmup
        self.fin_metrica = cfg.run_length_s - cfg.traffic.delay_max_s

    # --- utilidades ---

    def _generada(self, sensor: int, seq: int) -> float:
        return float(self.scenario.phases[sensor]) + seq * self.cfg.traffic.measurement_period_s

    def _en_metrica(self, instante: float) -> bool:
        return self.inicio_metrica <= instante <= self.fin_metrica

    def _duracion_relay(self, entradas: int) -> float:
        if entradas not in self._t_relay:
            por_entrada = self.cfg.traffic.measurement_bytes + self.cfg.traffic.sensor_id_bytes
            self._t_relay[entradas] = phy_timing.frame_duration(entradas * por_entrada, self.cfg.relay_radio)
        return self._t_relay[entradas]

    def _decodificada(self, trama: Transmission, receptor: int) -> bool:
        return channel_model.frame_delivered(
            trama.rx_power_mw[receptor],
            [otra.rx_power_mw[receptor] for otra in trama.interferers],
            self.psi[trama.spreading_factor],
            self.capture_ratio,
        )

    def _entregar(self, contenido, bit: int, instante: float):
        """La antigüedad se mide en instante: inicio de la trama del sensor, fin de la del relay."""
        d_max = self.cfg.traffic.delay_max_s
        for clave in contenido:
            if instante - self._generada(*clave) <= d_max + 1e-9:
                self.entregas[clave] = self.entregas.get(clave, 0) | bit

    def _iniciar(self, trama: Transmission, nodo: str):
        for otra in self.en_aire:
            if otra.kind == "relay" and trama.kind == "relay" and otra.end_s > trama.start_s:
                raise InvarianteViolado(f"tramas de relay superpuestas en t={trama.start_s:.6f}")
            if channel_model.interfiere(trama, otra):
                if otra.kind != trama.kind:
                    raise InvarianteViolado("una trama de relay interfiere con una de sensor")
                otra.interferers.append(trama)
                trama.interferers.append(otra)

        self.en_aire.append(trama)
        self.monitor.registrar(nodo, trama.start_s, trama.duration_s)

    # --- procesos ---

    def _sensor(self, i: int):
        cfg = self.cfg
        t = cfg.traffic.measurement_period_s
        fase = float(self.scenario.phases[i])
        gamma_d = self.gamma_sensor * self.dist_rx[i] ** (-self.alpha)
        k = 0

        while True:
            inicio = fase + k * t
            if inicio >= cfg.run_length_s:
                return
            yield self.env.timeout(max(inicio - self.env.now, 0.0))

            contenido = tuple((i, k - j) for j in range(cfg.redundancy + 1) if k - j >= 0)
            ganancias = np.array([rng.gamma(self.m, 1.0 / self.m) for rng in self.fading_sensores])
            trama = Transmission(
                sender_id=i,
                kind="sensor",
                channel=int(self.canal_sensores.integers(len(cfg.sensor_radio.channels_hz))),
                spreading_factor=cfg.sensor_radio.spreading_factor,
                start_s=inicio,
                duration_s=self.t_sensor[len(contenido)],
                contents=contenido,
                rx_power_mw=gamma_d * ganancias,
            )

            self._iniciar(trama, f"sensor-{i}")
            yield self.env.timeout(trama.duration_s)
            self._fin_sensor(trama, k)
            k += 1

    def _fin_sensor(self, trama: Transmission, k: int):
        self.en_aire.remove(trama)
        i = trama.sender_id
        en_metrica = self._en_metrica(self._generada(i, k))
        if en_metrica:
            self.tramas_sensor += 1

        if self._decodificada(trama, 0):
            if en_metrica:
                self.tramas_sensor_gw += 1
            self._entregar(trama.contents, DIRECTO, trama.start_s)

        for j, relay in enumerate(self.relays):
            cont = self.contadores[j]
            dentro = relay.in_rx_window(trama.start_s, trama.end_s, self.cfg.cycle_s, self.cfg.t_rx)
            decodificada = dentro and self._decodificada(trama, 1 + j)
            if en_metrica:
                cont.frames_seen += 1
                cont.frames_in_window += dentro
                cont.frames_decoded += decodificada
            if decodificada:
                # solo la medición actual; las pasadas no se guardan
                relay.buffer.setdefault((i, k), self._generada(i, k))

    def _relay(self, j: int):
        cfg = self.cfg
        relay = self.relays[j]
        cont = self.contadores[j]
        gamma_gw = self.gamma_relay * float(self.scenario.dist_relay_gw[j]) ** (-self.alpha)

        while True:
            inicio_tx = relay.offset_s + relay.cycle * cfg.cycle_s + cfg.t_rx
            if inicio_tx >= cfg.run_length_s:
                return
            yield self.env.timeout(max(inicio_tx - self.env.now, 0.0))

            entradas = list(relay.buffer)
            relay.buffer.clear()
            recibidas = len(entradas)
            if recibidas > self.v:
                elegidas = np.sort(self.descarte[j].choice(recibidas, size=self.v, replace=False))
                entradas = [entradas[x] for x in elegidas]

            if self._en_metrica(inicio_tx):
                cont.buffered += recibidas
                cont.dropped += recibidas - len(entradas)

            if entradas:
                if len(entradas) > self.v or len(set(entradas)) != len(entradas):
                    raise InvarianteViolado(f"relay {j}: contenido de trama inválido")
                duracion = self._duracion_relay(len(entradas))
                if duracion > cfg.t_tx:
                    raise InvarianteViolado(f"relay {j}: trama de {duracion:.6f} s excede t_tx")

                potencia = np.zeros(self.n_receptores)
                potencia[0] = gamma_gw * self.fading_relays[j].gamma(self.m, 1.0 / self.m)
                trama = Transmission(
                    sender_id=j,
                    kind="relay",
                    channel=int(self.canal_relays[j].integers(len(cfg.relay_radio.channels_hz))),
                    spreading_factor=cfg.relay_radio.spreading_factor,
                    start_s=inicio_tx,
                    duration_s=duracion,
                    contents=tuple(entradas),
                    rx_power_mw=potencia,
                )
                self._iniciar(trama, f"relay-{j}")
                yield self.env.timeout(duracion)
                self._fin_relay(trama, j, self._en_metrica(inicio_tx))

            relay.cycle += 1

    def _fin_relay(self, trama: Transmission, j: int, en_metrica: bool):
        self.en_aire.remove(trama)
        cont = self.contadores[j]
        decodificada = self._decodificada(trama, 0)
        if en_metrica:
            cont.frames_sent += 1
            cont.frames_delivered += decodificada
        if decodificada:
            self._entregar(trama.contents, 1 << (1 + j), self.env.now)

    # --- corrida ---

    def correr(self) -> MetricsReport:
        cfg = self.cfg
        for i in range(cfg.n_sensors):
            self.env.process(self._sensor(i))
        for j in range(cfg.n_relays):
            self.env.process(self._relay(j))

        # las tramas en el aire al final de la corrida terminan igual
        self.env.run(until=cfg.run_length_s + cfg.cycle_s)
        return self._reporte()

    def _reporte(self) -> MetricsReport:
        cfg = self.cfg
        t = cfg.traffic.measurement_period_s

        generadas = entregadas = directas = solo_directo = solo_relay = ambos = 0
        for i, fase in enumerate(self.scenario.phases):
            k_min = max(math.ceil((self.inicio_metrica - fase) / t), 0)
            k_max = math.floor((self.fin_metrica - fase) / t)
            for k in range(k_min, k_max + 1):
                generadas += 1
                mascara = self.entregas.get((i, k), 0)
                if not mascara:
                    continue
                entregadas += 1
                por_directo = bool(mascara & DIRECTO)
                por_relay = bool(mascara & ~DIRECTO)
                directas += por_directo
                solo_directo += por_directo and not por_relay
                solo_relay += por_relay and not por_directo
                ambos += por_directo and por_relay
                for j, cont in enumerate(self.contadores):
                    cont.delivered_measurements += (mascara >> (1 + j)) & 1

        if entregadas != solo_directo + solo_relay + ambos:
            raise InvarianteViolado("la conservación de mediciones no cierra")

        mlr = 1.0 - entregadas / generadas
        energia = (dbm_a_mw(cfg.sensor_radio.tx_power_dbm) / 1000.0) * phy_timing.frame_duration(
            (cfg.redundancy + 1) * cfg.traffic.measurement_bytes, cfg.sensor_radio
        )
        infinita = entregadas == 0

        return MetricsReport(
            mlr=mlr,
            e_m=math.inf if infinita else energia / (1.0 - mlr),
            e_m_infinite=infinita,
            energy_per_frame_j=energia,
            generated=generadas,
            delivered=entregadas,
            delivered_direct=directas,
            delivered_direct_only=solo_directo,
            delivered_relay_only=solo_relay,
            delivered_both=ambos,
            dropped_at_relay=sum(c.dropped for c in self.contadores),
            sensor_frames=self.tramas_sensor,
            sensor_frames_decoded_gw=self.tramas_sensor_gw,
            relays=tuple(self.contadores),
            seed=cfg.seed,
            config_digest=cfg.digest(),
        )


def run(scenario: Scenario) -> MetricsReport:
    """Una corrida completa; un solo hilo, determinística por (config, seed)."""
    cfg = scenario.config
    logger.info("Corrida n=%d ω=%d r=%d seed=%d (%.0f s)", cfg.n_sensors, cfg.n_relays,
                cfg.redundancy, cfg.seed, cfg.run_length_s)
    reporte = _Simulacion(scenario).correr()
    logger.info("MLR=%.6g con %d/%d mediciones entregadas", reporte.mlr, reporte.delivered, reporte.generated)
    return reporte


def simulate(config: ScenarioConfig) -> MetricsReport:
    return run(build_scenario(config))


# ---------------------------------------------------------
# Comparación con el análisis
# ---------------------------------------------------------

def _fila(componente: str, relay, conteo: tuple[int, int], analitico: float) -> dict:
    """conteo = (eventos, total) de una proporción binomial."""
    eventos, total = conteo
    if total > 0:
        p = eventos / total
        se = math.sqrt(p * (1.0 - p) / total)
    else:
        p, se = math.nan, math.nan

    if se > 0:
        z = (p - analitico) / se
    elif total > 0 and p == analitico:
        z = 0.0
    else:
        z = math.nan

    return {
        "component": componente,
        "relay": relay,
        "empirical": p,
        "std_error": se,
        "analytic": analitico,
        "z": z,
        "samples": total,
    }


def tally_vs_analysis(report: MetricsReport, breakdown) -> pd.DataFrame:
    """
    Estimaciones empíricas de cada componente de la MLP, alineadas con el
    desglose analítico (MlpBreakdown), con su error estándar y z-score.
    """
    filas = [
        _fila("p_single_gw", None,
              (report.sensor_frames - report.sensor_frames_decoded_gw, report.sensor_frames),
              1.0 - (1.0 - breakdown.p_i) * (1.0 - breakdown.p_f)),
        _fila("p_dir", None,
              (report.generated - report.delivered_direct, report.generated),
              breakdown.p_dir),
    ]

    for j, (cont, ana) in enumerate(zip(report.relays, breakdown.relays)):
        filas += [
            _fila("p_rw", j, (cont.frames_in_window, cont.frames_seen), ana.p_rw),
            _fila("p_s_r", j, (cont.frames_in_window - cont.frames_decoded, cont.frames_in_window), ana.p_s_r),
            _fila("p_drop", j, (cont.dropped, cont.buffered), ana.p_drop),
            _fila("p_r_g", j, (cont.frames_sent - cont.frames_delivered, cont.frames_sent), ana.p_r_g),
            _fila("p_ri", j, (report.generated - cont.delivered_measurements, report.generated), ana.p_ri),
        ]

    if report.relays:
        filas.append(_fila("mlp", None, (report.lost, report.generated), breakdown.mlp))

    return pd.DataFrame(filas, columns=["component", "relay", "empirical", "std_error",
                                        "analytic", "z", "samples"])
