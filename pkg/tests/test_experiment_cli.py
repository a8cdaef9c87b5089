# tests/test_experiment_cli.py

import json
from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from src.experiment_cli import cli

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_corta(tmp_path):
    """Perfil chico: 10 sensores, corridas de 20 minutos, una sola semilla."""
    datos = {
        "schema_version": 1,
        "profile": "corta",
        "scenario": {"n_sensors": 10, "run_length_s": 1200},
        "sweep": {"n": [10], "relays": [0, 1], "r": [3]},
        "runs": {"seed": 4, "count": 1, "min_losses": 0, "max_runs": 1},
    }
    path = tmp_path / "corta.json"
    path.write_text(json.dumps(datos), encoding="utf-8")
    return str(path)


# ---------------------------------------------------------
# analyze
# ---------------------------------------------------------

def test_analyze_por_defecto(runner, tmp_path):
    out = tmp_path / "analyze.csv"
    res = runner.invoke(cli, ["analyze", "--out", str(out)])

    assert res.exit_code == 0, res.output
    tabla = pd.read_csv(out)
    assert len(tabla) == 2
    assert list(tabla["relays"]) == [0, 1]
    assert (tabla["schema_version"] == 1).all()
    assert tabla["mlp"].to_list() == pytest.approx((tabla["p_dir"] * tabla["prod_p_r"]).to_list(), rel=1e-9)
    assert tabla.loc[1, "v"] == 94
    assert tabla.loc[1, "mlp"] < tabla.loc[0, "mlp"]


def test_analyze_con_sweep(runner, tmp_path):
    out = tmp_path / "a.csv"
    res = runner.invoke(cli, ["analyze", "--sweep", "n=20,40", "--sweep", "relays=0", "--out", str(out)])

    assert res.exit_code == 0, res.output
    tabla = pd.read_csv(out)
    assert list(tabla["n"]) == [20, 40]
    assert tabla["p_i"].is_monotonic_increasing


def test_analyze_no_pisa_la_salida(runner, tmp_path):
    out = tmp_path / "a.csv"
    runner.invoke(cli, ["analyze", "--out", str(out)])
    res = runner.invoke(cli, ["analyze", "--out", str(out)])

    assert res.exit_code == 0
    assert (tmp_path / "a_v2.csv").exists()


def test_analyze_con_el_perfil_del_repositorio(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    runner.invoke(cli, ["analyze", "--out", str(a)])
    res = runner.invoke(cli, ["analyze", "--config", str(DATA / "paper_setup.json"), "--out", str(b)])

    assert res.exit_code == 0, res.output
    columnas = ["relays", "p_dir", "mlp", "config_digest"]
    pd.testing.assert_frame_equal(pd.read_csv(a)[columnas], pd.read_csv(b)[columnas])


def test_analyze_perfil_v93(runner, tmp_path):
    out = tmp_path / "a.csv"
    res = runner.invoke(cli, ["analyze", "--config", str(DATA / "paper_setup_v93.json"), "--out", str(out)])

    assert res.exit_code == 0, res.output
    assert pd.read_csv(out).loc[1, "v"] == 93


def test_analyze_desglose_por_relay(runner, tmp_path):
    path = tmp_path / "leyes.json"
    path.write_text(json.dumps({
        "schema_version": 1,
        "analysis": {"dist_relay_gw": [{"law": "point", "u": 15}, {"law": "point", "u": 60}]},
        "sweep": {"relays": [0, 2]},
    }), encoding="utf-8")
    out = tmp_path / "a.csv"
    res = runner.invoke(cli, ["analyze", "--config", str(path), "--out", str(out)])

    assert res.exit_code == 0, res.output
    relays = pd.read_csv(tmp_path / "a_relays.csv")
    assert list(relays["relay"]) == [0, 1]
    assert (relays["relays"] == 2).all()
    assert relays.loc[1, "p_r_g"] > relays.loc[0, "p_r_g"]
    assert relays.loc[1, "p_s_r"] == pytest.approx(relays.loc[0, "p_s_r"])
    assert relays.loc[1, "p_ri"] > relays.loc[0, "p_ri"]

    tabla = pd.read_csv(out)
    assert tabla.loc[1, "prod_p_r"] == pytest.approx(relays["p_ri"].prod(), rel=1e-9)


# ---------------------------------------------------------
# simulate
# ---------------------------------------------------------

def test_simulate_es_determinista(runner, tmp_path, config_corta):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        res = runner.invoke(cli, ["simulate", "--config", config_corta, "--out", str(out)])
        assert res.exit_code == 0, res.output

    assert a.read_bytes() == b.read_bytes()

    tabla = pd.read_csv(a)
    assert list(tabla["row_type"]) == ["run", "run", "aggregate", "aggregate"]
    assert (tabla["seed"] == 4).all()
    assert (tabla["generated"] >= tabla["delivered"]).all()


def test_simulate_semilla_distinta(runner, tmp_path, config_corta):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    runner.invoke(cli, ["simulate", "--config", config_corta, "--out", str(a)])
    runner.invoke(cli, ["simulate", "--config", config_corta, "--seed", "5", "--out", str(b)])

    assert pd.read_csv(a)["config_digest"][0] != pd.read_csv(b)["config_digest"][0]


def test_simulate_baja_confianza(runner, tmp_path, config_corta):
    out = tmp_path / "s.csv"
    res = runner.invoke(cli, ["simulate", "--config", config_corta, "--sweep", "relays=0",
                              "--min-losses", "100000", "--max-runs", "2", "--out", str(out)])

    assert res.exit_code == 0, res.output
    assert "⚠" in res.output
    tabla = pd.read_csv(out)
    agregado = tabla[tabla["row_type"] == "aggregate"].iloc[0]
    assert agregado["runs"] == 2
    assert bool(agregado["low_confidence"])


def test_simulate_con_tally(runner, tmp_path, config_corta):
    out = tmp_path / "s.csv"
    res = runner.invoke(cli, ["simulate", "--config", config_corta, "--tally", "--out", str(out)])

    assert res.exit_code == 0, res.output
    tally = pd.read_csv(tmp_path / "s_tally.csv")
    assert {"p_dir", "p_rw", "mlp"} <= set(tally["component"])
    assert set(tally["relays"]) == {0, 1}


# ---------------------------------------------------------
# allocate
# ---------------------------------------------------------

def test_allocate_con_meta_trivial(runner, tmp_path):
    out = tmp_path / "al.csv"
    res = runner.invoke(cli, ["allocate", "--target", "1", "--out", str(out)])

    assert res.exit_code == 0, res.output
    tabla = pd.read_csv(out)
    assert list(tabla["r_star"]) == [0, 0]
    assert tabla["met_target"].all()
    assert (tabla["r_max"] == 6).all()


def test_allocate_simulando(runner, tmp_path, config_corta):
    out = tmp_path / "al.csv"
    res = runner.invoke(cli, ["allocate", "--config", config_corta, "--target", "0.5",
                              "--sweep", "relays=0", "--simulate", "--out", str(out)])

    assert res.exit_code == 0, res.output
    asignada = pd.read_csv(out)
    simulada = pd.read_csv(tmp_path / "al_simulate.csv")
    assert simulada["r"].iloc[0] == asignada["r_tilde"].iloc[0]
    assert simulada["p_target"].iloc[0] == 0.5


def test_allocate_objetivo_exigente_con_el_perfil_calibrado(runner, tmp_path):
    out = tmp_path / "al.csv"
    res = runner.invoke(cli, ["allocate", "--config", str(DATA / "paper_setup_cal.json"), "--target", "0.001",
                              "--sweep", "relays=0,1,2,5", "--out", str(out)])

    assert res.exit_code == 0, res.output
    tabla = pd.read_csv(out)
    assert tabla["met_target"].tolist() == [False, False, False, True]
    assert tabla["r_star"].tolist()[:3] == [6, 6, 6]
    assert (tabla["r_tilde"] == 6).all()


def test_allocate_sin_meta(runner, tmp_path):
    res = runner.invoke(cli, ["allocate", "--out", str(tmp_path / "al.csv")])
    assert res.exit_code == 1


# ---------------------------------------------------------
# validate
# ---------------------------------------------------------

def test_validate_ventana(runner, tmp_path):
    out = tmp_path / "v.csv"
    res = runner.invoke(cli, ["validate", "--checks", "p_rw", "--samples", "100000", "--out", str(out)])

    assert res.exit_code == 0, res.output
    assert "🎉" in res.output
    assert list(pd.read_csv(out)["check"]) == ["p_rw"]


def test_validate_sin_verificaciones(runner):
    res = runner.invoke(cli, ["validate", "--checks", ""])
    assert res.exit_code == 1


def test_validate_verificacion_desconocida(runner):
    res = runner.invoke(cli, ["validate", "--checks", "p_x"])
    assert res.exit_code == 1


def test_validate_captura_alterada_sale_con_2(runner):
    res = runner.invoke(cli, ["validate", "--checks", "p_i", "--capture-factor", "0.5",
                              "--samples", "100000"])
    assert res.exit_code == 2


# ---------------------------------------------------------
# Errores de configuración
# ---------------------------------------------------------

def test_config_inexistente(runner, tmp_path):
    res = runner.invoke(cli, ["analyze", "--config", str(tmp_path / "nada.json")])
    assert res.exit_code == 1


def test_config_invalida(runner, tmp_path):
    path = tmp_path / "mala.json"
    path.write_text(json.dumps({"schema_version": 1, "scenario": {"redundancy": 9}}), encoding="utf-8")

    res = runner.invoke(cli, ["analyze", "--config", str(path), "--out", str(tmp_path / "a.csv")])
    assert res.exit_code == 1
    assert "scenario.redundancy" in res.output


def test_sweep_mal_escrito(runner, tmp_path):
    res = runner.invoke(cli, ["analyze", "--sweep", "k=1", "--out", str(tmp_path / "a.csv")])
    assert res.exit_code == 1


def test_opcion_desconocida(runner):
    res = runner.invoke(cli, ["analyze", "--nada"])
    assert res.exit_code == 1
