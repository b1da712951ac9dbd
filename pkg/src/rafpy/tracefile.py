"""
Solver traces as ADIOS2 BP files.

Every recorded iterate becomes one ADIOS2 step holding the iterate ``z`` and the
scalars ``residual``, ``loss`` and (when tracked) ``distance``. Problem metadata
goes into file attributes. Needs the optional ``adios2`` package.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Mapping
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from rafpy.sensing import ProblemInstance, Variant
from rafpy.solver import SolverResult, TraceRecord

try:
    import adios2  # type: ignore[import-untyped]
    import adios2.bindings as adios2bindings  # type: ignore[import-untyped]
except ImportError:  # pragma: no cover
    adios2 = None
    adios2bindings = None

_MODES = ("rra", "w")


def _openmode(mode: str) -> Any:
    if mode not in _MODES:
        msg = f"unknown mode '{mode}', expected one of {_MODES}"
        raise ValueError(msg)
    return {
        "rra": adios2bindings.Mode.ReadRandomAccess,
        "w": adios2bindings.Mode.Write,
    }[mode]


class TraceFile:
    """
    A BP file with one step per solver iteration.

    Write mode appends steps with :meth:`write_step`; ``"rra"`` mode reads any
    variable across all steps at once with :meth:`read`.
    """

    _io: Any = None
    _engine: Any = None

    def __init__(
        self,
        filename: os.PathLike[Any] | str,
        mode: str = "rra",
        engine_type: str | None = None,
    ) -> None:
        if adios2bindings is None:
            msg = "trace files need the optional 'adios2' package (pip install rafpy[adios2])"
            raise ImportError(msg)
        self._filename = filename
        self._mode = mode
        self._adios = adios2bindings.ADIOS()
        self._io_name = f"io-rafpy-{id(self)}"
        self._io = self._adios.DeclareIO(self._io_name)
        if engine_type is not None:
            self._io.SetEngine(engine_type)
        self._engine = self._io.Open(os.fspath(filename), _openmode(mode))
        self._steps_written = 0

    def __bool__(self) -> bool:
        """True while the file is open."""
        return self._engine is not None and self._io is not None

    @property
    def filename(self) -> os.PathLike[Any] | str:
        return self._filename

    @property
    def mode(self) -> str:
        return self._mode

    def close(self) -> None:
        if not self:
            msg = "TraceFile is not open"
            raise ValueError(msg)
        self._engine.Close()
        self._adios.RemoveIO(self._io_name)
        self._engine = None
        self._io = None

    def __del__(self) -> None:
        if self:
            self.close()

    def __repr__(self) -> str:
        if not self:
            return "rafpy.TraceFile(closed)"
        return f"rafpy.TraceFile(filename={os.fspath(self._filename)!r}, mode={self._mode})"

    def __enter__(self) -> TraceFile:
        return self

    def __exit__(self, exc_type: Any, exc_value: Any, traceback: Any) -> None:
        self.close()

    def __len__(self) -> int:
        if self._mode == "w":
            return self._steps_written
        return int(self._engine.Steps())

    @property
    def variables(self) -> list[str]:
        return sorted(self._io.AvailableVariables().keys())

    def write_step(self, **arrays: ArrayLike) -> None:
        """Append one step holding the given arrays; shapes must not change between steps."""
        if self._mode != "w":
            msg = f"Cannot write steps in mode {self._mode}."
            raise ValueError(msg)
        self._engine.BeginStep()
        for name, value in arrays.items():
            data = np.asarray(value)
            if data.ndim != 0:
                data = np.ascontiguousarray(data)
            if not data.flags["WRITEABLE"]:
                data = data.copy()
            var = self._io.InquireVariable(name)
            if not var:
                var = self._io.DefineVariable(
                    name, data, data.shape, [0] * data.ndim, data.shape, isConstantDims=True
                )
            elif tuple(var.Shape()) != data.shape:
                self._engine.EndStep()
                msg = f"variable '{name}' changed shape to {data.shape}"
                raise ValueError(msg)
            self._engine.Put(var, data, adios2bindings.Mode.Sync)
        self._engine.EndStep()
        self._steps_written += 1

    def read(self, name: str) -> NDArray[Any]:
        """All steps of ``name`` stacked along a leading step axis."""
        if self._mode != "rra":
            msg = f"Cannot read whole variables in mode {self._mode}."
            raise ValueError(msg)
        var = self._io.InquireVariable(name)
        if not var:
            msg = f"Variable '{name}' not found"
            raise KeyError(msg)
        steps = len(self)
        var.SetStepSelection((0, steps))
        shape = tuple(var.Shape())
        if shape:
            var.SetSelection(([0] * len(shape), list(shape)))
        data = np.empty((steps, *shape), dtype=adios2.type_adios_to_numpy(var.Type()))
        self._engine.Get(var, data, adios2bindings.Mode.Sync)
        return data

    def set_attribute(self, name: str, value: ArrayLike) -> None:
        if isinstance(value, (str, list)):
            self._io.DefineAttribute(name, value)
        else:
            self._io.DefineAttribute(name, np.asarray(value))

    def get_attribute(self, name: str) -> Any:
        attr = self._io.InquireAttribute(name)
        if not attr:
            msg = f"Attribute '{name}' not found"
            raise KeyError(msg)
        data = attr.DataString() if attr.Type() == "string" else attr.Data()
        return data[0] if attr.SingleValue() else data

    @property
    def attrs(self) -> Mapping[str, Any]:
        return {name: self.get_attribute(name) for name in self._io.AvailableAttributes()}

    def recorder(self) -> Callable[[int, NDArray[Any], TraceRecord], None]:
        """A ``solve`` callback that writes each recorded iterate as one step."""

        def record(t: int, z: NDArray[Any], rec: TraceRecord) -> None:
            arrays: dict[str, ArrayLike] = {
                "iteration": np.int64(t),
                "z": z,
                "residual": np.float64(rec.residual),
                "loss": np.float64(rec.loss),
            }
            if rec.distance is not None:
                arrays["distance"] = np.float64(rec.distance)
            self.write_step(**arrays)

        return record


def describe_instance(trace: TraceFile, instance: ProblemInstance) -> None:
    """Store the problem shape and noise level as file attributes."""
    trace.set_attribute("variant", instance.model.variant.value)
    trace.set_attribute("n", np.int64(instance.n))
    trace.set_attribute("m", np.int64(instance.m))
    trace.set_attribute("noise_sigma", np.float64(instance.noise_sigma))


def read_trace(filename: os.PathLike[Any] | str) -> dict[str, NDArray[Any]]:
    with TraceFile(filename, "rra") as trace:
        return {name: trace.read(name) for name in trace.variables}


def write_trace(
    filename: os.PathLike[Any] | str, instance: ProblemInstance, result: SolverResult
) -> None:
    """
    Store a finished run: one step per trace record, final iterate as attributes.

    The final iterate goes into ``z_final_real`` and ``z_final_imag`` since
    attributes are real-valued.
    """
    columns = result.as_arrays()
    with TraceFile(filename, "w") as trace:
        describe_instance(trace, instance)
        trace.set_attribute("iterations_run", np.int64(result.iterations_run))
        trace.set_attribute("z_final_real", np.ascontiguousarray(result.z_final.real))
        trace.set_attribute("z_final_imag", np.ascontiguousarray(np.imag(result.z_final)))
        for k in range(len(result.trace)):
            trace.write_step(**{name: np.float64(col[k]) for name, col in columns.items()})


def read_final_iterate(filename: os.PathLike[Any] | str) -> NDArray[Any]:
    with TraceFile(filename, "rra") as trace:
        real = np.asarray(trace.get_attribute("z_final_real"), dtype=np.float64)
        imag = np.asarray(trace.get_attribute("z_final_imag"), dtype=np.float64)
        variant = trace.get_attribute("variant")
    if Variant(variant).is_complex:
        return real + 1j * imag
    return real
