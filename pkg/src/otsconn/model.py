"""Solver-neutral MILP container."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np

CONTINUOUS = "continuous"
BINARY = "binary"
SENSES = ("<=", "=", ">=")
_SENSE_CODE = {"<=": -1, "=": 0, ">=": 1}


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    lower: float
    upper: float


class MilpModel:
    """Variables, sparse linear rows and a linear objective (minimised).

    Row tags are unique names whose prefix records provenance, for example
    ``eq1d_b3_k5`` is the lower angle-flow row of branch 3 in the copy for
    contingency 5. ``provenance(tag)`` recovers the block label.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.index: dict[str, int] = {}
        self.objective: dict[int, float] = {}
        self.obj_constant = 0.0
        self.rows: list[dict[int, float]] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []
        self.tags: list[str] = []
        self._tagset: set[str] = set()
        self.meta: dict = {}
        self._dense = None

    # construction ------------------------------------------------------
    def add_variable(self, name: str, kind: str = CONTINUOUS,
                     lower: float = -math.inf, upper: float = math.inf) -> int:
        if name in self.index:
            raise ValueError(f"duplicate variable {name}")
        if kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown kind {kind}")
        if kind == BINARY and not (0 <= lower <= upper <= 1):
            raise ValueError(f"binary {name} needs bounds within [0, 1]")
        if lower > upper:
            raise ValueError(f"{name}: lower bound exceeds upper bound")
        self.index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, float(lower), float(upper)))
        self._dense = None
        return self.index[name]

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float, tag: str) -> int:
        if sense not in SENSES:
            raise ValueError(f"bad sense {sense}")
        if tag in self._tagset:
            raise ValueError(f"duplicate row tag {tag}")
        row = {}
        for j, a in coeffs.items():
            if not 0 <= j < len(self.variables):
                raise IndexError(f"row {tag} references unknown variable {j}")
            if not math.isfinite(a):
                raise ValueError(f"row {tag} has a non-finite coefficient")
            if a != 0.0:
                row[j] = row.get(j, 0.0) + float(a)
        if not math.isfinite(rhs):
            raise ValueError(f"row {tag} has a non-finite right-hand side")
        self.rows.append(row)
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        self.tags.append(tag)
        self._tagset.add(tag)
        self._dense = None
        return len(self.rows) - 1

    def add_objective(self, j: int, coef: float) -> None:
        self.objective[j] = self.objective.get(j, 0.0) + float(coef)
        self._dense = None

    def copy(self, name: str | None = None) -> "MilpModel":
        out = copy.copy(self)
        out.variables = list(self.variables)
        out.index = dict(self.index)
        out.objective = dict(self.objective)
        out.rows = [dict(r) for r in self.rows]
        out.senses = list(self.senses)
        out.rhs = list(self.rhs)
        out.tags = list(self.tags)
        out._tagset = set(self._tagset)
        out.meta = copy.deepcopy(self.meta)
        out._dense = None
        if name is not None:
            out.name = name
        return out

    def fix(self, values: dict[str, float]) -> "MilpModel":
        """Copy with the named variables fixed (lower = upper = value)."""
        out = self.copy()
        for name, v in values.items():
            j = out.index[name]
            var = out.variables[j]
            out.variables[j] = Variable(var.name, var.kind, float(v), float(v))
        return out

    # queries -----------------------------------------------------------
    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def var(self, name: str) -> int:
        return self.index[name]

    def binaries(self) -> list[int]:
        return [j for j, v in enumerate(self.variables) if v.kind == BINARY]

    def census(self) -> dict[str, int]:
        out = {CONTINUOUS: 0, BINARY: 0}
        for v in self.variables:
            out[v.kind] += 1
        return out

    def rows_with_prefix(self, prefix: str) -> list[int]:
        return [i for i, t in enumerate(self.tags) if t.startswith(prefix)]

    def dense(self):
        """(c, A, sense codes, b, lower, upper) as numpy arrays, cached."""
        if self._dense is None:
            n, m = self.n_vars, self.n_rows
            c = np.zeros(n)
            for j, a in self.objective.items():
                c[j] = a
            A = np.zeros((m, n))
            for i, row in enumerate(self.rows):
                for j, a in row.items():
                    A[i, j] = a
            senses = np.array([_SENSE_CODE[s] for s in self.senses], dtype=int)
            b = np.array(self.rhs, dtype=float)
            lo = np.array([v.lower for v in self.variables])
            up = np.array([v.upper for v in self.variables])
            self._dense = (c, A, senses, b, lo, up)
        return self._dense

    def evaluate_rows(self, x) -> np.ndarray:
        _, A, _, _, _, _ = self.dense()
        return A @ np.asarray(x, dtype=float)

    def objective_value(self, x) -> float:
        c = self.dense()[0]
        return float(c @ np.asarray(x, dtype=float)) + self.obj_constant


def provenance(tag: str) -> str:
    """Block label of a row tag, e.g. ``eq1d_b3_k5`` -> ``1d``."""
    head = tag.split("_", 1)[0]
    return head[2:] if head.startswith("eq") else head
