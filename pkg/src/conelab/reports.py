"""Report records shared by every verification routine."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class BoundReport:
    """One checked inequality ``lhs <= rhs``.

    For tolerance checks (``difference < tol``) the measured quantity is the
    lhs and the tolerance the rhs.  ``passed`` is decided by the producer,
    normally ``margin >= -quadrature_error_estimate``.
    """

    name: str
    lhs: float
    rhs: float
    quadrature_error_estimate: float = 0.0
    passed: bool | None = None
    inputs: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        if self.passed is not None:
            return self.passed
        return self.margin >= -self.quadrature_error_estimate

    def as_row(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        d["passed"] = self.ok
        return {k: _plain(v) for k, v in d.items()}


def _plain(v):
    """Convert numpy scalars/arrays into JSON-friendly values."""
    if hasattr(v, "tolist"):
        return _plain(v.tolist())
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v
