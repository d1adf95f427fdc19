"""Result record shared by the closed-form and numerical CNOT designs."""

import math
from dataclasses import dataclass, field


@dataclass
class DesignSolution:
    """One CNOT design: gate time, drive amplitudes and efficiency.

    ``t_cnot`` is in units of ``pi / (2 g)``; ``rabi`` maps amplitude names to
    values in units of ``g``.
    """

    model: str
    g: float
    k: float
    t_cnot: float
    rabi: dict
    eta: float = float("nan")
    area: float = float("nan")
    n: int = None
    m: int = None
    residual: float = float("nan")
    constraints_ok: bool = True
    notes: list = field(default_factory=list)

    @property
    def t_seconds(self):
        return self.t_cnot * math.pi / (2 * self.g)

    def as_row(self):
        row = {"model": self.model, "k": self.k, "t_cnot": self.t_cnot}
        if self.n is not None:
            row["n"] = self.n
        if self.m is not None:
            row["m"] = self.m
        row.update(self.rabi)
        row["eta"] = self.eta
        row["residual"] = self.residual
        return row
