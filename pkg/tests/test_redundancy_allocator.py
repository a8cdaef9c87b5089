# tests/test_redundancy_allocator.py

from pathlib import Path
from types import SimpleNamespace

import pytest

from src import loader
from src.analytic_model import AnalyticInputs
from src.redundancy_allocator import allocate


def mlp_falso(valores):
    """mlp_fn que devuelve valores fijos por r."""
    return lambda inputs: SimpleNamespace(mlp=valores[inputs.r])


def test_p_target_uno_siempre_se_cumple():
    res = allocate(AnalyticInputs(), 1.0, 6, mlp_fn=mlp_falso([0.5] * 7))

    assert res.r_star == 0
    assert res.met_target
    # SF10: r = 0 y r = 1 entran en los mismos 8 símbolos de payload
    assert res.r_tilde == 1


def test_primer_r_que_cumple():
    valores = [0.1, 0.05, 0.02, 0.009, 0.004, 0.002, 0.001]
    res = allocate(AnalyticInputs(), 0.01, 6, mlp_fn=mlp_falso(valores))

    assert res.r_star == 3
    assert res.mlp_at_r_star == 0.009
    assert res.mlp_by_r == tuple(valores)
    # b = 3..7 bytes ocupan los mismos símbolos en SF10
    assert res.r_tilde == 6


def test_no_se_asume_monotonia():
    valores = [0.1, 0.005, 0.2, 0.001, 0.3, 0.3, 0.3]
    res = allocate(AnalyticInputs(), 0.01, 6, mlp_fn=mlp_falso(valores))
    assert res.r_star == 1


def test_meta_inalcanzable_devuelve_el_minimo():
    valores = [0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04]
    res = allocate(AnalyticInputs(), 0.001, 6, mlp_fn=mlp_falso(valores))

    assert not res.met_target
    assert res.r_star == 6
    assert res.r_tilde == 6


def test_empates_van_al_r_mas_chico():
    valores = [0.5, 0.2, 0.2, 0.3]
    res = allocate(AnalyticInputs(), 0.01, 3, mlp_fn=mlp_falso(valores))
    assert res.r_star == 1


def test_r_tilde_no_supera_r_max():
    res = allocate(AnalyticInputs(), 0.5, 4, mlp_fn=mlp_falso([0.9, 0.9, 0.4, 0.3, 0.2]))
    assert res.r_star == 2
    assert res.r_tilde == 4


@pytest.mark.parametrize("p_target, r_max", [(0.0, 6), (1.5, 6), (0.01, -1)])
def test_parametros_invalidos(p_target, r_max):
    with pytest.raises(ValueError):
        allocate(AnalyticInputs(), p_target, r_max, mlp_fn=mlp_falso([0.1] * 7))


def test_con_el_modelo_analitico():
    res = allocate(AnalyticInputs(omega=0), 0.01, 6)

    assert res.met_target
    assert res.mlp_at_r_star <= 0.01
    assert all(valor > 0.01 for valor in res.mlp_by_r[:res.r_star])
    assert res.r_star <= res.r_tilde <= 6


# ---------------------------------------------------------
# Perfil calibrado
# ---------------------------------------------------------

DATA = Path(__file__).resolve().parents[1] / "data"


def inputs_calibrados(relays):
    spec = loader.load_config(DATA / "paper_setup_cal.json")
    config = spec.scenario.replace(n_relays=relays, redundancy=0)
    return AnalyticInputs.from_scenario(config, **loader.analysis_overrides(spec))


@pytest.mark.parametrize("relays", [0, 1, 2])
def test_pocos_relays_no_alcanzan_un_objetivo_exigente(relays):
    res = allocate(inputs_calibrados(relays), 0.001, 6)

    assert not res.met_target
    assert res.r_star == 6
    assert res.r_tilde == 6
    assert res.mlp_at_r_star == min(res.mlp_by_r)


@pytest.mark.parametrize("relays", [3, 5])
def test_con_tres_o_mas_relays_el_objetivo_se_cumple(relays):
    res = allocate(inputs_calibrados(relays), 0.001, 6)

    assert res.met_target
    assert res.mlp_at_r_star <= 0.001
    assert res.r_star <= res.r_tilde <= 6
