"""Spatial partitions of the unit interval.

The right endpoint x_m = 1 carries the homogeneous Dirichlet condition, so a
mesh with ``m`` elements has ``m`` free nodes x_0..x_{m-1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InvalidMeshError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    nodes: np.ndarray
    widths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise InvalidMeshError("a mesh needs at least two elements")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise InvalidMeshError("mesh must start at 0 and end at 1 exactly")
        widths = np.diff(nodes)
        if np.any(widths <= 0.0):
            raise InvalidMeshError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        widths.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "widths", widths)

    @property
    def m(self) -> int:
        """Number of elements (equals the number of free nodes)."""
        return self.widths.size

    @property
    def h(self) -> float:
        return float(self.widths.max())

    @property
    def beta(self) -> float:
        return quasi_uniformity_ratio(self)

    @property
    def free_nodes(self) -> np.ndarray:
        return self.nodes[:-1]

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.widths - 1.0 / self.m) <= rtol / self.m))

    def to_text(self) -> str:
        return "".join(f"{x:.17g}\n" for x in self.nodes)

    @classmethod
    def from_text(cls, text: str) -> "Mesh":
        return cls(np.array([float(t) for t in text.split()]))

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return self.nodes.shape == other.nodes.shape and bool(np.all(self.nodes == other.nodes))

    def __hash__(self):
        return hash(self.nodes.tobytes())


def build_uniform_mesh(m: int) -> Mesh:
    if int(m) != m or m < 2:
        raise InvalidMeshError(f"uniform mesh needs m >= 2, got {m}")
    m = int(m)
    nodes = np.arange(m + 1, dtype=float) / m
    return Mesh(nodes)


def build_graded_mesh(m: int, grading: float) -> Mesh:
    """Power-law mesh x_j = (j/m)**grading, refined towards the origin."""
    if int(m) != m or m < 2:
        raise InvalidMeshError(f"graded mesh needs m >= 2, got {m}")
    if not grading >= 1.0:
        raise InvalidMeshError(f"grading must be >= 1, got {grading}")
    m = int(m)
    nodes = (np.arange(m + 1, dtype=float) / m) ** grading
    nodes[-1] = 1.0
    return Mesh(nodes)


def quasi_uniformity_ratio(mesh: Mesh) -> float:
    return float(mesh.widths.max() / mesh.widths.min())
