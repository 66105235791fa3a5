"""Reading TSPLIB instance files and computing edge weights.

Only the coordinate-based subset of the format is supported: a header of
``KEY: value`` lines followed by a ``NODE_COORD_SECTION`` of ``id x y`` rows.
Three of the TSPLIB edge-weight functions are implemented bit-for-bit
(``EUC_2D``, ``GEO`` and ``ATT``), plus ``RAW_EUC``, the plain unrounded
Euclidean distance on the file coordinates, which can be applied to any file.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from statsp.core import DistanceMatrix

__all__ = [
    "BUNDLED_INSTANCES",
    "Metric",
    "NodeCoord",
    "TsplibParseError",
    "TspInstance",
    "build_distance_matrix",
    "distance",
    "format_instance",
    "load_bundled",
    "load_instance",
    "parse_instance",
]

BUNDLED_INSTANCES = ("ulysses16", "att48", "berlin52")

# Constants of the TSPLIB reference implementation.
_GEO_PI = 3.141592
_GEO_RADIUS = 6378.388


class Metric(str, enum.Enum):
    EUC_2D = "EUC_2D"
    GEO = "GEO"
    ATT = "ATT"
    RAW_EUC = "RAW_EUC"

    @classmethod
    def from_name(cls, name: str) -> "Metric":
        """Accept both header spellings (``EUC_2D``) and CLI spellings (``euc2d``)."""
        key = name.strip().upper().replace("-", "_")
        aliases = {"EUC2D": "EUC_2D", "RAW": "RAW_EUC", "RAWEUC": "RAW_EUC"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown metric {name!r}") from None


class TsplibParseError(ValueError):
    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        self.line_no = line_no
        self.line = line
        if line_no is not None:
            message = f"line {line_no}: {message}"
            if line is not None:
                message += f" ({line.strip()!r})"
        super().__init__(message)


@dataclass(frozen=True)
class NodeCoord:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class TspInstance:
    name: str
    coords: tuple[NodeCoord, ...]
    declared_metric: Metric
    active_metric: Metric = Metric.RAW_EUC
    comment: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if len(self.coords) < 3:
            raise ValueError(f"an instance needs at least 3 nodes, got {len(self.coords)}")
        ids = [c.id for c in self.coords]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("node ids must be 1..n in order")
        _check_metric_applicable(self.active_metric, self.declared_metric)

    @property
    def n(self) -> int:
        return len(self.coords)

    def xy(self) -> np.ndarray:
        return np.array([(c.x, c.y) for c in self.coords], dtype=float)

    def with_metric(self, metric: Metric | str) -> "TspInstance":
        if isinstance(metric, str):
            metric = Metric.from_name(metric)
        return TspInstance(self.name, self.coords, self.declared_metric, metric, self.comment)


def _check_metric_applicable(metric: Metric, declared: Metric) -> None:
    if metric is not Metric.RAW_EUC and metric is not declared:
        raise ValueError(
            f"metric {metric.value} does not match the file's EDGE_WEIGHT_TYPE {declared.value}; "
            "only RAW_EUC may override the declared type"
        )


_SUPPORTED_TYPES = {"EUC_2D": Metric.EUC_2D, "GEO": Metric.GEO, "ATT": Metric.ATT}


def parse_instance(text: str, metric: Metric | str | None = None) -> TspInstance:
    """Parse the contents of a ``.tsp`` file.

    ``metric`` selects the active distance function. ``None`` means
    ``RAW_EUC``; pass ``"declared"`` to use the file's own EDGE_WEIGHT_TYPE.
    Node ids are renumbered 1..n in file order.
    """
    header: dict[str, tuple[str, int, str]] = {}
    rows: list[tuple[float, float]] = []
    seen_ids: set[str] = set()
    section_line: int | None = None
    in_coords = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if _is_number(parts[0]):
                if len(parts) != 3:
                    raise TsplibParseError("expected 'id x y'", line_no, raw)
                node_id, x, y = parts
                try:
                    xy = (float(x), float(y))
                except ValueError:
                    raise TsplibParseError("non-numeric coordinate", line_no, raw) from None
                if node_id in seen_ids:
                    raise TsplibParseError(f"duplicate node id {node_id}", line_no, raw)
                seen_ids.add(node_id)
                rows.append(xy)
                continue
            # a keyword after the coordinate block ends the section
            in_coords = False
        if line.upper().startswith("NODE_COORD_SECTION"):
            in_coords = True
            section_line = line_no
            continue
        if line.upper().endswith("_SECTION"):
            # other sections (display data, tours, ...) are not needed
            in_coords = False
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = (value.strip(), line_no, raw)
        # anything else (stray keywords, section payloads) is ignored

    if "DIMENSION" not in header:
        raise TsplibParseError("missing DIMENSION")
    dim_text, dim_line, dim_raw = header["DIMENSION"]
    try:
        dim = int(dim_text)
    except ValueError:
        raise TsplibParseError("DIMENSION is not an integer", dim_line, dim_raw) from None

    if "EDGE_WEIGHT_TYPE" not in header:
        raise TsplibParseError("missing EDGE_WEIGHT_TYPE")
    ewt, ewt_line, ewt_raw = header["EDGE_WEIGHT_TYPE"]
    declared = _SUPPORTED_TYPES.get(ewt.upper())
    if declared is None:
        raise TsplibParseError(f"unsupported EDGE_WEIGHT_TYPE {ewt}", ewt_line, ewt_raw)

    if section_line is None:
        raise TsplibParseError("missing NODE_COORD_SECTION")
    if len(rows) != dim:
        raise TsplibParseError(
            f"DIMENSION is {dim} but NODE_COORD_SECTION has {len(rows)} rows", section_line
        )

    if metric is None:
        active = Metric.RAW_EUC
    elif isinstance(metric, str) and metric.lower() == "declared":
        active = declared
    elif isinstance(metric, str):
        active = Metric.from_name(metric)
    else:
        active = metric

    name = header.get("NAME", ("unnamed", 0, ""))[0]
    if name.endswith(".tsp"):
        name = name[: -len(".tsp")]
    coords = tuple(NodeCoord(i, x, y) for i, (x, y) in enumerate(rows, start=1))
    return TspInstance(
        name=name,
        coords=coords,
        declared_metric=declared,
        active_metric=active,
        comment=header.get("COMMENT", ("", 0, ""))[0],
    )


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_instance(path: str | Path, metric: Metric | str | None = None) -> TspInstance:
    return parse_instance(Path(path).read_text(encoding="utf-8"), metric)


def load_bundled(name: str, metric: Metric | str | None = None) -> TspInstance:
    """Load one of the instances shipped with the package (see ``BUNDLED_INSTANCES``)."""
    key = name.lower().removesuffix(".tsp")
    if key not in BUNDLED_INSTANCES:
        raise KeyError(f"no bundled instance {name!r}; available: {', '.join(BUNDLED_INSTANCES)}")
    text = resources.files("statsp").joinpath("data", f"{key}.tsp").read_text(encoding="utf-8")
    return parse_instance(text, metric)


def format_instance(instance: TspInstance) -> str:
    """Serialize back to TSPLIB text. Coordinates use ``repr`` so they round-trip."""
    lines = [
        f"NAME: {instance.name}",
        "TYPE: TSP",
    ]
    if instance.comment:
        lines.append(f"COMMENT: {instance.comment}")
    lines += [
        f"DIMENSION: {instance.n}",
        f"EDGE_WEIGHT_TYPE: {instance.declared_metric.value}",
        "NODE_COORD_SECTION",
    ]
    lines += [f"{c.id} {c.x!r} {c.y!r}" for c in instance.coords]
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def _nint(value: float) -> int:
    return int(value + 0.5)


def _geo_radians(value: float) -> float:
    deg = int(value)
    minutes = value - deg
    return _GEO_PI * (deg + 5.0 * minutes / 3.0) / 180.0


def distance(metric: Metric, a: NodeCoord, b: NodeCoord) -> float:
    if a.x == b.x and a.y == b.y:
        return 0.0
    if metric is Metric.RAW_EUC:
        dx = a.x - b.x
        dy = a.y - b.y
        return math.sqrt(dx * dx + dy * dy)
    if metric is Metric.EUC_2D:
        dx = a.x - b.x
        dy = a.y - b.y
        return float(_nint(math.sqrt(dx * dx + dy * dy)))
    if metric is Metric.ATT:
        dx = a.x - b.x
        dy = a.y - b.y
        r = math.sqrt((dx * dx + dy * dy) / 10.0)
        t = _nint(r)
        return float(t + 1 if t < r else t)
    if metric is Metric.GEO:
        lat_a, lon_a = _geo_radians(a.x), _geo_radians(a.y)
        lat_b, lon_b = _geo_radians(b.x), _geo_radians(b.y)
        q1 = math.cos(lon_a - lon_b)
        q2 = math.cos(lat_a - lat_b)
        q3 = math.cos(lat_a + lat_b)
        arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
        # acos is undefined past +-1; the reference code never gets there on real data
        arg = min(1.0, max(-1.0, arg))
        return float(int(_GEO_RADIUS * math.acos(arg) + 1.0))
    raise ValueError(f"unsupported metric {metric!r}")


def build_distance_matrix(instance: TspInstance) -> DistanceMatrix:
    metric = instance.active_metric
    n = instance.n
    if metric is Metric.GEO:
        d = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                d[i, j] = d[j, i] = distance(metric, instance.coords[i], instance.coords[j])
        return DistanceMatrix(d)

    xy = instance.xy()
    dx = xy[:, 0][:, None] - xy[:, 0][None, :]
    dy = xy[:, 1][:, None] - xy[:, 1][None, :]
    sq = dx * dx + dy * dy
    if metric is Metric.RAW_EUC:
        d = np.sqrt(sq)
    elif metric is Metric.EUC_2D:
        d = np.floor(np.sqrt(sq) + 0.5)
    elif metric is Metric.ATT:
        r = np.sqrt(sq / 10.0)
        t = np.floor(r + 0.5)
        d = np.where(t < r, t + 1.0, t)
    else:
        raise ValueError(f"unsupported metric {metric!r}")
    # exact symmetry regardless of operand order in the subtraction
    d = np.triu(d, 1)
    d = d + d.T
    return DistanceMatrix(d)
