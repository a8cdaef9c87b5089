"""
Jerarquía de excepciones del simulador.

Todas heredan de ErrorSimulador para que la CLI pueda atraparlas juntas;
las de configuración además son ValueError, como las que levanta cualquier
validación de parámetros.
"""


class ErrorSimulador(Exception):
    """Raíz de los errores propios del proyecto."""


class ConfigInvalidaError(ErrorSimulador, ValueError):
    """
    Parámetro o archivo de configuración inválido.

    campo : ruta con puntos del parámetro (ej. "scenario.traffic.delay_max_s")
    linea, columna : posición en el JSON cuando el error es de sintaxis
    """

    def __init__(self, mensaje: str, campo: str | None = None,
                 linea: int | None = None, columna: int | None = None):
        self.mensaje = mensaje
        self.campo = campo
        self.linea = linea
        self.columna = columna

        prefijo = ""
        if linea is not None:
            prefijo = f"línea {linea}, columna {columna}: "
        elif campo:
            prefijo = f"{campo}: "
        super().__init__(prefijo + mensaje)


class RedundanciaInfactibleError(ErrorSimulador, ValueError):
    """Ni siquiera r = 0 respeta el límite de ciclo de trabajo."""


class CapacidadNulaError(ErrorSimulador, ValueError):
    """No entra ni una medición en una trama de relay de duración t_tx."""


class CuadraturaError(ErrorSimulador, ArithmeticError):
    """La cuadratura no alcanzó la tolerancia pedida tras refinar."""


class UbicacionError(ErrorSimulador, RuntimeError):
    """El muestreo por rechazo de posiciones de relays no encontró solución."""


class InvarianteViolado(ErrorSimulador, AssertionError):
    """Un invariante del simulador dejó de cumplirse durante una corrida."""
