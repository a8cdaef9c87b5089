"""
Flujos aleatorios con nombre para una corrida.

Cada nombre ("placement/sensors", "fading/gateway", ...) obtiene su propio
Generator Philox (contador) derivado de (seed, crc32(nombre)). Agregar
relays crea flujos nuevos sin mover los sorteos de los sensores.
"""

from __future__ import annotations

import zlib

import numpy as np


class RngStreams:

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._flujos: dict[str, np.random.Generator] = {}

    def stream(self, nombre: str) -> np.random.Generator:
        if nombre not in self._flujos:
            clave = zlib.crc32(nombre.encode("utf-8"))
            semilla = np.random.SeedSequence(entropy=self.seed, spawn_key=(clave,))
            self._flujos[nombre] = np.random.Generator(np.random.Philox(semilla))
        return self._flujos[nombre]

    def __getitem__(self, nombre: str) -> np.random.Generator:
        return self.stream(nombre)
