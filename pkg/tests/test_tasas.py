# tests/test_tasas.py

import math

import pandas as pd
import pytest

from src.salidas import con_esquema, exportar_csv, versionar_archivo
from src.tasas import calcular_tasas, tasas_por_punto


def corridas(*valores, n=60, relays=0, r=3, p_target=math.nan):
    """valores: (generadas, entregadas) por corrida."""
    filas = []
    for k, (gen, ent) in enumerate(valores):
        filas.append({
            "n": n, "relays": relays, "r": r, "p_target": p_target,
            "seed": 1 + k, "config_digest": f"d{k}",
            "generated": gen, "delivered": ent, "mlr": 1 - ent / gen,
            "energy_per_frame_j": 0.005,
        })
    return pd.DataFrame(filas)


def test_calcular_tasas():
    res = calcular_tasas(corridas((100, 90), (100, 80)), min_losses=20)

    assert res["runs"] == 2
    assert res["lost"] == 30
    assert res["mlr_mean"] == pytest.approx(0.15)
    assert res["mlr_pooled"] == pytest.approx(0.15)
    # desvío muestral de (0.1, 0.2) sobre raíz de 2
    assert res["mlr_se"] == pytest.approx(0.05)
    assert res["e_m"] == pytest.approx(0.005 / 0.85)
    assert not res["low_confidence"]


def test_una_sola_corrida_no_tiene_error_estandar():
    res = calcular_tasas(corridas((100, 99)), min_losses=100)

    assert math.isnan(res["mlr_se"])
    assert res["low_confidence"]


def test_sin_entregas_la_energia_es_infinita():
    res = calcular_tasas(corridas((50, 0), (50, 0)))

    assert res["mlr_pooled"] == 1.0
    assert math.isinf(res["e_m"])
    assert res["e_m_infinite"]


def test_tasas_por_punto_respeta_el_orden_y_los_objetivos_vacios():
    df = pd.concat([
        corridas((100, 90), relays=1),
        corridas((100, 50), (100, 70), relays=0),
        corridas((100, 99), relays=0, p_target=0.01),
    ], ignore_index=True)

    tabla = tasas_por_punto(df, min_losses=10)

    assert list(tabla["relays"]) == [1, 0, 0]
    assert list(tabla["runs"]) == [1, 2, 1]
    assert tabla["p_target"].isna().tolist() == [True, True, False]
    assert tabla.loc[1, "mlr_pooled"] == pytest.approx(0.4)
    assert tabla.loc[1, "seed"] == 1


# ---------------------------------------------------------
# Salidas
# ---------------------------------------------------------

def test_versionar_archivo(tmp_path):
    path = tmp_path / "salida.csv"
    assert versionar_archivo(str(path)) == str(path)

    path.write_text("x")
    assert versionar_archivo(str(path)) == str(tmp_path / "salida_v2.csv")

    (tmp_path / "salida_v2.csv").write_text("x")
    assert versionar_archivo(str(path)) == str(tmp_path / "salida_v3.csv")


def test_con_esquema():
    df = con_esquema(pd.DataFrame([{"b": 2, "a": 1}]), ["a", "b", "c"])

    assert list(df.columns) == ["schema_version", "a", "b", "c"]
    assert df.loc[0, "schema_version"] == 1
    assert math.isnan(df.loc[0, "c"])


def test_exportar_csv_crea_carpeta_y_no_pisa(tmp_path):
    df = pd.DataFrame([{"x": 1 / 3}])
    destino = exportar_csv(df, str(tmp_path / "out" / "t.csv"))
    segundo = exportar_csv(df, str(tmp_path / "out" / "t.csv"))
    pisado = exportar_csv(df, str(tmp_path / "out" / "t.csv"), sobrescribir=True)

    assert destino.endswith("t.csv")
    assert segundo.endswith("t_v2.csv")
    assert pisado == destino
    assert "0.333333333333" in (tmp_path / "out" / "t.csv").read_text()
