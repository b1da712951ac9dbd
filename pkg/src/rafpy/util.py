from __future__ import annotations

import math

from rafpy.sensing import Variant

_name_to_variant = {
    "real-gaussian": Variant.REAL_GAUSSIAN,
    "real": Variant.REAL_GAUSSIAN,
    "complex-gaussian": Variant.COMPLEX_GAUSSIAN,
    "complex": Variant.COMPLEX_GAUSSIAN,
    "cdp": Variant.CDP,
}

# absolute slack when deciding whether a sweep endpoint is reached
SWEEP_TOLERANCE = 1e-9


def name_to_variant(name: str) -> Variant:
    try:
        return _name_to_variant[name.strip().lower()]
    except KeyError:
        msg = f"unknown model '{name}', expected one of {sorted(_name_to_variant)}"
        raise ValueError(msg) from None


def parse_float(text: str) -> float:
    """Parse a float, accepting ``inf``/``+inf`` for the noiseless SNR sentinel."""
    value = text.strip().lower()
    if value in ("inf", "+inf", "infinity", "noiseless"):
        return math.inf
    return float(value)


def parse_sweep(text: str) -> list[float]:
    """
    Parse ``start:stop:step`` (endpoints inclusive) or a comma-separated list.

    >>> parse_sweep("1:2:0.5")
    [1.0, 1.5, 2.0]
    """
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            msg = f"range '{text}' must look like start:stop:step"
            raise ValueError(msg)
        start, stop, step = (float(part) for part in parts)
        if step <= 0.0 or stop < start:
            msg = f"range '{text}' needs step > 0 and stop >= start"
            raise ValueError(msg)
        count = math.floor((stop - start) / step + SWEEP_TOLERANCE) + 1
        # round away accumulated binary noise, e.g. 1 + 3 * 0.1
        return [round(start + k * step, 12) for k in range(count)]
    values = [parse_float(part) for part in text.split(",") if part.strip()]
    if not values:
        msg = "sweep list is empty"
        raise ValueError(msg)
    return values
