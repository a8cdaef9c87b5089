# tests/test_phy_timing.py

from fractions import Fraction

import pytest

from src import phy_timing
from src.errores import CapacidadNulaError, ConfigInvalidaError, RedundanciaInfactibleError
from src.phy_timing import RadioConfig, TrafficConfig

# (b, s, h, l, c, n_pr, w, milisegundos) calculados a mano
TIEMPOS_EN_AIRE = [
    (7, 10, 1, 0, 1, 8, 125e3, "206.848"),
    (186, 7, 1, 0, 1, 8, 125e3, "292.096"),
    (4, 10, 1, 0, 1, 8, 125e3, "206.848"),
    (0, 12, 1, 1, 1, 8, 125e3, "663.552"),
    (0, 7, 1, 0, 1, 0, 125e3, "12.544"),
    (1, 7, 1, 0, 1, 8, 125e3, "25.856"),
    (10, 7, 1, 0, 1, 8, 125e3, "36.096"),
    (10, 7, 0, 0, 1, 8, 125e3, "41.216"),
    (10, 7, 1, 0, 4, 8, 125e3, "45.312"),
    (20, 8, 1, 0, 1, 8, 125e3, "92.672"),
    (20, 9, 1, 0, 2, 8, 125e3, "205.824"),
    (51, 11, 1, 1, 1, 8, 125e3, "1232.896"),
    (51, 11, 1, 0, 1, 8, 125e3, "1069.056"),
    (51, 12, 1, 1, 1, 8, 125e3, "2301.952"),
    (8, 10, 1, 0, 1, 8, 125e3, "247.808"),
    (17, 10, 1, 0, 1, 8, 125e3, "288.768"),
    (18, 10, 1, 0, 1, 8, 125e3, "329.728"),
    (188, 7, 1, 0, 1, 8, 125e3, "297.216"),
    (190, 7, 1, 0, 1, 8, 125e3, "302.336"),
    (186, 7, 0, 0, 1, 8, 125e3, "297.216"),
    (12, 7, 1, 0, 3, 16, 125e3, "57.6"),
    (10, 7, 1, 0, 1, 8, 250e3, "18.048"),
]


@pytest.mark.parametrize("b, s, h, l, c, n_pr, w, ms", TIEMPOS_EN_AIRE)
def test_frame_duration_exacta(b, s, h, l, c, n_pr, w, ms):
    cfg = RadioConfig(spreading_factor=s, bandwidth_hz=w, n_preamble=n_pr,
                      header_enabled=h, low_data_rate_opt=l, code_param=c)
    esperado = Fraction(ms) / 1000

    assert phy_timing.frame_duration_exact(b, cfg) == esperado
    assert phy_timing.frame_duration(b, cfg) == float(esperado)


def test_componentes_de_la_trama_sensor():
    cfg = RadioConfig(spreading_factor=10)

    assert phy_timing.symbol_duration(cfg) == pytest.approx(8.192e-3)
    assert phy_timing.preamble_duration(cfg) == pytest.approx(100.352e-3)
    assert phy_timing.payload_symbols(7, cfg) == 13
    assert phy_timing.payload_duration(7, cfg) == pytest.approx(106.496e-3)
    assert phy_timing.frame_symbols(7, cfg) == Fraction(101, 4)


def test_payload_vacio_usa_solo_los_ocho_simbolos_fijos():
    cfg = RadioConfig(spreading_factor=12, low_data_rate_opt=1)
    assert phy_timing.payload_symbols(0, cfg) == 8


def test_payload_negativo_es_error():
    with pytest.raises(ValueError):
        phy_timing.payload_symbols(-1, RadioConfig(spreading_factor=7))


def test_low_data_rate_se_resuelve_solo():
    assert RadioConfig(spreading_factor=11).low_data_rate_opt == 1
    assert RadioConfig(spreading_factor=12).low_data_rate_opt == 1
    assert RadioConfig(spreading_factor=10).low_data_rate_opt == 0
    assert RadioConfig(spreading_factor=12, bandwidth_hz=250e3).low_data_rate_opt == 0


@pytest.mark.parametrize("campos, campo", [
    ({"spreading_factor": 6}, "spreading_factor"),
    ({"spreading_factor": 13}, "spreading_factor"),
    ({"spreading_factor": 7, "code_param": 5}, "code_param"),
    ({"spreading_factor": 7, "header_enabled": 2}, "header_enabled"),
    ({"spreading_factor": 7, "channels_hz": ()}, "channels_hz"),
])
def test_radio_config_invalida(campos, campo):
    with pytest.raises(ConfigInvalidaError) as info:
        RadioConfig(**campos)
    assert info.value.campo == campo


def test_traffic_config_invalida():
    with pytest.raises(ConfigInvalidaError):
        TrafficConfig(duty_cycle_limit=0)
    with pytest.raises(ConfigInvalidaError):
        TrafficConfig(delay_max_s=10)


def test_bitrate():
    assert phy_timing.bitrate(RadioConfig(spreading_factor=7)) == pytest.approx(5468.75)


# ---------------------------------------------------------
# Ciclo de trabajo y redundancia
# ---------------------------------------------------------

def test_duty_cycle_del_sensor():
    cfg = RadioConfig(spreading_factor=10)
    assert phy_timing.duty_cycle(3, cfg, TrafficConfig()) == pytest.approx(0.206848 / 30)


def test_r_max_del_perfil_por_defecto():
    cotas = phy_timing.redundancy_bounds(RadioConfig(spreading_factor=10), TrafficConfig())

    assert cotas == {"storage": 10, "duty": 16, "delay": 6}
    assert phy_timing.max_redundancy(RadioConfig(spreading_factor=10), TrafficConfig()) == 6


def test_r_max_limitado_por_almacenamiento():
    traffic = TrafficConfig(storage_bytes_max=2)
    assert phy_timing.max_redundancy(RadioConfig(spreading_factor=10), traffic) == 2


def test_r_max_limitado_por_ciclo():
    traffic = TrafficConfig(storage_bytes_max=100, delay_max_s=3000)
    assert phy_timing.max_redundancy(RadioConfig(spreading_factor=10), traffic) == 16


def test_redundancia_infactible():
    with pytest.raises(RedundanciaInfactibleError):
        phy_timing.max_redundancy(RadioConfig(spreading_factor=10), TrafficConfig(duty_cycle_limit=0.001))


def test_capacidad_del_relay_por_defecto():
    cfg = RadioConfig(spreading_factor=7)
    traffic = TrafficConfig()
    v = phy_timing.relay_capacity(cfg, traffic, 0.3)

    assert v == 94
    # v entra y v + 1 no
    assert phy_timing.frame_duration_exact(2 * v, cfg) <= Fraction(3, 10)
    assert phy_timing.frame_duration_exact(2 * (v + 1), cfg) > Fraction(3, 10)


def test_capacidad_del_perfil_de_calibracion():
    cfg = RadioConfig(spreading_factor=7, header_enabled=0)
    assert phy_timing.relay_capacity(cfg, TrafficConfig(), 0.3) == 93


def test_capacidad_nula():
    with pytest.raises(CapacidadNulaError):
        phy_timing.relay_capacity(RadioConfig(spreading_factor=7), TrafficConfig(), 0.01)


def test_a_fraccion_recupera_el_decimal_escrito():
    assert phy_timing.a_fraccion(0.3) == Fraction(3, 10)
    assert phy_timing.a_fraccion(Fraction(1, 3)) == Fraction(1, 3)


def test_capacidad_con_entradas_el_doble_de_largas():
    cfg = RadioConfig(spreading_factor=7)
    simple = phy_timing.relay_capacity(cfg, TrafficConfig(), 0.3)
    doble = phy_timing.relay_capacity(cfg, TrafficConfig(measurement_bytes=2, sensor_id_bytes=2), 0.3)

    assert doble == pytest.approx(simple / 2, abs=1)
