"""
Emptiness Osculating Paths

This module colours the edges of a six-vertex configuration on a rectangle
Gamma_{L,R} black (reversed relative to the all up / all right reference)
or gray (reversed relative to all down / all left), and reads the black
edges as up-right paths that may touch but never cross.

Rectangle indexing: vertices (a, b) with 0 <= a < L, 0 <= b < R.
``black_h`` has shape (L+1, R) and ``black_v`` shape (L, R+1); vertex
(a, b) sees W = h[a, b], E = h[a+1, b], S = v[a, b] and N = v[a, b+1].
Column 0 and L of ``h`` and row 0 and R of ``v`` form the boundary.

Figure coordinates put vertex (a, b) at the point (a+1, b+1), so that the
unit segment (x, y)-(x+1, y) is h[x, y-1] and (x, y)-(x, y+1) is v[x-1, y].
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from ..core.errors import ValidationError
from ..sixvertex.configuration import TYPE_BY_BLACK, IceRuleReport, SixVertexConfig

Point = Tuple[int, int]
Polyline = List[Point]

# Incoming side -> outgoing side per vertex type; type 4 osculates.
_ROUTING = {
    2: {"W": "E"},
    3: {"S": "N"},
    4: {"W": "N", "S": "E"},
    5: {"W": "N"},
    6: {"S": "E"},
}


@dataclass(frozen=True)
class OscPathConfig:
    """Black edges of an osculating-path configuration on Gamma_{L,R}."""
    black_h: np.ndarray = field(compare=False)
    black_v: np.ndarray = field(compare=False)
    periodic: bool = False

    def __post_init__(self):
        h = np.array(self.black_h, dtype=bool)
        v = np.array(self.black_v, dtype=bool)
        if h.ndim != 2 or v.ndim != 2:
            raise ValidationError("black masks must be 2-d")
        width, height = v.shape[0], h.shape[1]
        if width < 1 or height < 1 or h.shape != (width + 1, height) or v.shape != (width, height + 1):
            raise ValidationError(f"mask shapes {h.shape} and {v.shape} do not describe a rectangle")
        h.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "black_h", h)
        object.__setattr__(self, "black_v", v)

    @property
    def width(self) -> int:
        return self.black_v.shape[0]

    @property
    def height(self) -> int:
        return self.black_h.shape[1]

    @property
    def gray_h(self) -> np.ndarray:
        return ~self.black_h

    @property
    def gray_v(self) -> np.ndarray:
        return ~self.black_v

    @classmethod
    def empty(cls, width: int, height: int) -> "OscPathConfig":
        """No black edges: the reference configuration."""
        return cls(np.zeros((width + 1, height), dtype=bool), np.zeros((width, height + 1), dtype=bool))

    def with_edges(self, black_h: np.ndarray, black_v: np.ndarray) -> "OscPathConfig":
        return OscPathConfig(black_h, black_v, self.periodic)

    def boundary(self) -> Tuple[bytes, bytes, bytes, bytes]:
        """Left, right, bottom and top boundary colours."""
        return (
            self.black_h[0].tobytes(),
            self.black_h[-1].tobytes(),
            self.black_v[:, 0].tobytes(),
            self.black_v[:, -1].tobytes(),
        )

    def sides(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Black indicators of (W, E, S, N) at every vertex, each of shape (L, R)."""
        return self.black_h[:-1], self.black_h[1:], self.black_v[:, :-1], self.black_v[:, 1:]

    def vertex_types(self) -> np.ndarray:
        """Six-vertex type 1..6 of every vertex, 0 where the ice rule fails."""
        west, east, south, north = self.sides()
        types = np.zeros((self.width, self.height), dtype=np.int8)
        for black, kind in TYPE_BY_BLACK.items():
            types[(west == black[0]) & (east == black[1]) & (south == black[2]) & (north == black[3])] = kind
        return types

    def connection_table(self) -> Dict[Tuple[int, int], Dict[str, str]]:
        """Which incident black edges join at each vertex, incoming side to outgoing side."""
        types = self.vertex_types()
        return {
            (int(a), int(b)): dict(_ROUTING.get(int(types[a, b]), {}))
            for a in range(self.width)
            for b in range(self.height)
        }

    def black_count(self) -> int:
        return int(self.black_h.sum() + self.black_v.sum())

    def key(self) -> Tuple[Tuple[int, int], bytes, bytes]:
        return (self.width, self.height), self.black_h.tobytes(), self.black_v.tobytes()

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, OscPathConfig):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "width": self.width,
            "height": self.height,
            "periodic": self.periodic,
            "black_h": self.black_h.astype(int).tolist(),
            "black_v": self.black_v.astype(int).tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "OscPathConfig":
        data = json.loads(text)
        return cls(np.array(data["black_h"]), np.array(data["black_v"]), bool(data.get("periodic", False)))


def validate_opc(x: OscPathConfig) -> IceRuleReport:
    """Ice rule on the rectangle: as many black edges enter each vertex as leave it."""
    west, east, south, north = x.sides()
    bad = (west.astype(int) + south) != (east.astype(int) + north)
    violations = [(int(a), int(b)) for a, b in np.argwhere(bad)]
    return IceRuleReport(valid=not violations, violations=violations)


def require_valid_opc(x: OscPathConfig) -> OscPathConfig:
    report = validate_opc(x)
    if not report.valid:
        raise ValidationError(f"osculating path configuration violates the ice rule at vertex {report.first_violation}")
    return x


def rectangle_from_spins(h_spins: np.ndarray, v_spins: np.ndarray, periodic: bool = False) -> OscPathConfig:
    """
    Colour rectangle edge spins: -1 (left / down) becomes black.

    Args:
        h_spins: Horizontal spins, shape (L+1, R)
        v_spins: Vertical spins, shape (L, R+1)
        periodic: Whether the rectangle is a torus cut open

    Returns:
        Validated OscPathConfig
    """
    h_spins = np.asarray(h_spins)
    v_spins = np.asarray(v_spins)
    if not (np.all(np.abs(h_spins) == 1) and np.all(np.abs(v_spins) == 1)):
        raise ValidationError("edge spins must be +1 or -1")
    return require_valid_opc(OscPathConfig(h_spins < 0, v_spins < 0, periodic))


def rectangle_spins(x: OscPathConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Edge spins of the rectangle, black = -1."""
    return (
        np.where(x.black_h, -1, 1).astype(np.int8),
        np.where(x.black_v, -1, 1).astype(np.int8),
    )


def subrectangle(config: SixVertexConfig, a0: int, b0: int, width: int, height: int) -> OscPathConfig:
    """
    Restrict a torus configuration to the rectangle of vertices
    (a0 .. a0+width-1, b0 .. b0+height-1), indices taken mod (n, t).
    """
    if not (1 <= width <= config.n and 1 <= height <= config.t):
        raise ValidationError(
            f"rectangle {width}x{height} does not fit in the {config.n}x{config.t} torus"
        )
    cols_h = (a0 - 1 + np.arange(width + 1)) % config.n
    rows_h = (b0 + np.arange(height)) % config.t
    cols_v = (a0 + np.arange(width)) % config.n
    rows_v = (b0 - 1 + np.arange(height + 1)) % config.t
    h = config.h[np.ix_(cols_h, rows_h)]
    v = config.v[np.ix_(cols_v, rows_v)]
    full = width == config.n and height == config.t
    return rectangle_from_spins(h, v, periodic=full)


def to_opc(config: SixVertexConfig) -> OscPathConfig:
    """The whole torus configuration cut open along its seams."""
    return subrectangle(config, 0, 0, config.n, config.t)


def from_opc(x: OscPathConfig) -> SixVertexConfig:
    """
    Glue a cut-open torus back together.

    The seams must match: column 0 of ``h`` equals column L, row 0 of ``v``
    equals row R.
    """
    if not (np.array_equal(x.black_h[0], x.black_h[-1]) and np.array_equal(x.black_v[:, 0], x.black_v[:, -1])):
        raise ValidationError("opposite boundary edges differ; the rectangle does not close into a torus")
    h_spins, v_spins = rectangle_spins(x)
    # h[a] of the torus is the east edge of vertex a; v[:, b] the north edge
    return SixVertexConfig(h_spins[1:], v_spins[:, 1:])


def _unit_segments(start: Point, end: Point):
    (x0, y0), (x1, y1) = start, end
    if x0 != x1 and y0 != y1:
        raise ValidationError(f"segment {start}-{end} is not axis-aligned")
    if x1 < x0 or y1 < y0:
        raise ValidationError(f"segment {start}-{end} does not go up or right")
    for x in range(x0, x1):
        yield "h", x, y0
    for y in range(y0, y1):
        yield "v", x0, y


def from_polylines(width: int, height: int, paths: Sequence[Sequence[Point]]) -> OscPathConfig:
    """
    Build a configuration from black up-right paths given as corner points in
    figure coordinates.

    Args:
        width: L, vertices per row
        height: R, vertices per column
        paths: Polylines, each a sequence of (x, y) corners

    Returns:
        Validated OscPathConfig

    Raises:
        ValidationError: On edges outside the rectangle, reused edges or an
            ice-rule violation
    """
    black_h = np.zeros((width + 1, height), dtype=bool)
    black_v = np.zeros((width, height + 1), dtype=bool)
    for path in paths:
        for start, end in zip(path[:-1], path[1:]):
            for kind, x, y in _unit_segments(tuple(start), tuple(end)):
                if kind == "h":
                    index, target = (x, y - 1), black_h
                else:
                    index, target = (x - 1, y), black_v
                if not (0 <= index[0] < target.shape[0] and 0 <= index[1] < target.shape[1]):
                    raise ValidationError(f"segment from {(x, y)} leaves the {width}x{height} rectangle")
                if target[index]:
                    raise ValidationError(f"edge at {(x, y)} is used twice")
                target[index] = True
    return require_valid_opc(OscPathConfig(black_h, black_v))


def _corners(points: List[Point]) -> Polyline:
    kept = [points[0]]
    for prev, point, nxt in zip(points[:-2], points[1:-1], points[2:]):
        if (point[0] - prev[0], point[1] - prev[1]) != (nxt[0] - point[0], nxt[1] - point[1]):
            kept.append(point)
    kept.append(points[-1])
    return kept


def trace_paths(x: OscPathConfig) -> List[Polyline]:
    """
    Decompose the black edges into up-right paths, pairing W with N and S
    with E at vertices where four black edges meet.

    Returns:
        Corner polylines in figure coordinates, paths entering on the left
        (bottom to top) first, then those entering at the bottom (left to
        right)
    """
    require_valid_opc(x)
    types = x.vertex_types()
    width, height = x.width, x.height
    starts = [((0, b), "W", (0, b + 1)) for b in range(height) if x.black_h[0, b]]
    starts += [((a, 0), "S", (a + 1, 0)) for a in range(width) if x.black_v[a, 0]]

    paths = []
    for (a, b), side, origin in starts:
        points = [origin]
        while True:
            points.append((a + 1, b + 1))
            out = _ROUTING[int(types[a, b])][side]
            if out == "E":
                if a + 1 == width:
                    points.append((width + 1, b + 1))
                    break
                a, side = a + 1, "W"
            else:
                if b + 1 == height:
                    points.append((a + 1, height + 1))
                    break
                b, side = b + 1, "S"
        paths.append(_corners(points))
    logger.debug(f"Traced {len(paths)} black paths on a {width}x{height} rectangle")
    return paths


def render_ascii(x: OscPathConfig) -> str:
    """
    Text picture, north at the top: ``#`` black edge, ``.`` gray edge,
    ``o`` vertex.
    """
    lines = []
    for row in range(x.height, -1, -1):
        vertical = [" "] * (2 * x.width + 1)
        for a in range(x.width):
            vertical[2 * a + 1] = "#" if x.black_v[a, row] else "."
        lines.append("".join(vertical))
        if row == 0:
            break
        b = row - 1
        cells = []
        for a in range(x.width + 1):
            cells.append("#" if x.black_h[a, b] else ".")
            if a < x.width:
                cells.append("o")
        lines.append("".join(cells))
    return "\n".join(lines)
