from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh


@dataclass(frozen=True, eq=False)
class NodalField:
    """A P1 function on ``mesh`` vanishing at x = 1, stored by its free nodal values."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.m,):
            raise ValueError(f"expected {self.mesh.m} nodal values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, mesh: Mesh) -> "NodalField":
        return cls(mesh, np.zeros(mesh.m))

    @classmethod
    def hat(cls, mesh: Mesh, j: int) -> "NodalField":
        v = np.zeros(mesh.m)
        v[j] = 1.0
        return cls(mesh, v)

    @classmethod
    def interpolate(cls, mesh: Mesh, func) -> "NodalField":
        return cls(mesh, np.asarray(func(mesh.free_nodes), dtype=float) * np.ones(mesh.m))

    @property
    def full_values(self) -> np.ndarray:
        """Nodal values including the Dirichlet zero at x_m."""
        return np.append(self.values, 0.0)

    def __call__(self, x):
        return np.interp(x, self.mesh.nodes, self.full_values)

    def __add__(self, other: "NodalField") -> "NodalField":
        return NodalField(self.mesh, self.values + other.values)

    def __sub__(self, other: "NodalField") -> "NodalField":
        return NodalField(self.mesh, self.values - other.values)

    def __rmul__(self, c: float) -> "NodalField":
        return NodalField(self.mesh, c * self.values)

    def prolongate(self, fine: Mesh) -> "NodalField":
        """Exact representation on a mesh whose nodes contain ours."""
        if not nodes_nested(self.mesh, fine):
            raise NotNestedError("target mesh does not contain every node of the source mesh")
        return NodalField(fine, self(fine.free_nodes))


class NotNestedError(ValueError):
    pass


def nodes_nested(coarse: Mesh, fine: Mesh, tol: float = 1e-12) -> bool:
    idx = np.searchsorted(fine.nodes, coarse.nodes - tol)
    idx = np.clip(idx, 0, fine.nodes.size - 1)
    return bool(np.all(np.abs(fine.nodes[idx] - coarse.nodes) <= tol))
