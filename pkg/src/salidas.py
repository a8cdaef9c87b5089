# src/salidas.py

import os

import pandas as pd

SCHEMA_VERSION_CSV = 1
FLOAT_FORMAT = "%.12g"


def versionar_archivo(path):
    """
    Nombre libre para una salida CSV (analyze, simulate, tallies).
    Si path existe:
        archivo.csv -> archivo_v2.csv -> archivo_v3.csv ...
    Devuelve el nombre final donde debe guardarse.
    """
    if not os.path.exists(path):
        return path

    base, ext = os.path.splitext(path)
    version = 2

    while True:
        candidate = f"{base}_v{version}{ext}"
        if not os.path.exists(candidate):
            return candidate
        version += 1


def con_esquema(df, columnas):
    """Orden fijo de columnas con schema_version adelante; las que falten quedan vacías."""
    df = df.reindex(columns=columnas)
    df.insert(0, "schema_version", SCHEMA_VERSION_CSV)
    return df


def exportar_csv(df, path, sobrescribir=False):
    """
    Escribe el CSV con 12 cifras significativas. Sin sobrescribir, una
    salida existente se conserva y se escribe la siguiente versión.
    """
    carpeta = os.path.dirname(path)
    if carpeta:
        os.makedirs(carpeta, exist_ok=True)

    destino = path if sobrescribir else versionar_archivo(path)
    df.to_csv(destino, index=False, float_format=FLOAT_FORMAT)
    return destino