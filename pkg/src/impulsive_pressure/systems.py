"""Shipped example systems, addressable by name from configs and the CLI."""
from __future__ import annotations

from .errors import UnsupportedSystemError
from .flows import OdeField, RotationCircle, SuspensionDoubling, TranslationInterval
from .geometry import Space
from .impulsive import ImpulsiveSystem


def rotation_circle(speed: float = 1.0) -> ImpulsiveSystem:
    return ImpulsiveSystem(RotationCircle(speed), name="rotation_circle")


def impulsive_circle(speed: float = 1.0, jump: float = 0.5, image: float = 0.0, xi: float = 0.1,
                     event_tol: float = 0.025) -> ImpulsiveSystem:
    """Unit-speed rotation sent back from ``jump`` to ``image``: a periodic loop of length 0.5."""
    return ImpulsiveSystem.build(RotationCircle(speed), [[jump]], [[image]], xi=xi,
                                 event_tol=event_tol, name="impulsive_circle")


def suspension_doubling(roof: float = 1.0) -> ImpulsiveSystem:
    return ImpulsiveSystem(SuspensionDoubling(Space.suspension(roof)), name="suspension_doubling")


def interval_translation(speed: float = 1.0) -> ImpulsiveSystem:
    """Translation on [0, 1] reset from 0.5 to 0.1; orbits starting past 0.5 stop at 1."""
    return ImpulsiveSystem.build(TranslationInterval(speed, Space.interval(0.0, 1.0)), [[0.5]], [[0.1]],
                                 xi=0.1, event_tol=0.025, name="interval_translation")


def torus_rotation(a: float = 1.0, b: float = 0.5, step: float = 0.05) -> ImpulsiveSystem:
    """Linear flow on the 2-torus, integrated as a constant vector field."""
    flow = OdeField("constant", {"velocity": [a, b]}, step, Space.torus2())
    return ImpulsiveSystem(flow, name="torus_rotation")


def ode_circle(a: float = 1.0, b: float = 0.5, step: float = 0.01) -> ImpulsiveSystem:
    """Circle flow with speed ``a + b sin(2 pi x)`` and a reset from 0.75 to 0.25."""
    flow = OdeField("circle_sine", {"a": a, "b": b}, step, Space.circle())
    return ImpulsiveSystem.build(flow, [[0.75]], [[0.25]], xi=0.1, event_tol=0.025, name="ode_circle")


SHIPPED_SYSTEMS = {
    "rotation_circle": rotation_circle,
    "impulsive_circle": impulsive_circle,
    "suspension_doubling": suspension_doubling,
    "interval_translation": interval_translation,
    "torus_rotation": torus_rotation,
    "ode_circle": ode_circle,
}


def get_system(name: str, **params) -> ImpulsiveSystem:
    try:
        factory = SHIPPED_SYSTEMS[name]
    except KeyError:
        raise UnsupportedSystemError(
            f"unknown system {name!r}; shipped: {', '.join(sorted(SHIPPED_SYSTEMS))}") from None
    return factory(**params)
