import hashlib
import io
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from separability.serializers import RunReportSerializer
from separability.services.errors import ParseError
from separability.services.linalg import DensityMatrix

logger = logging.getLogger(__name__)


def state_digest(rho: DensityMatrix | None, params: dict | None = None) -> str:
    """SHA-256 over dims, the complex128 little-endian matrix bytes and the canonical params JSON."""
    h = hashlib.sha256()
    if rho is not None:
        h.update(json.dumps(list(rho.dims)).encode())
        h.update(np.ascontiguousarray(rho.mat, dtype="<c16").tobytes())
    h.update(json.dumps(params or {}, sort_keys=True, separators=(",", ":")).encode())
    return h.hexdigest()


@dataclass
class RunReport:
    command: str
    digest: str = ""
    reports: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    optimization: object = None
    reproduction: list = field(default_factory=list)
    orderings: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter, repr=False)
    wall_time: float = 0.0

    def finish(self) -> "RunReport":
        self.wall_time = time.perf_counter() - self.started
        return self

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "digest": self.digest,
            "reports": [r.as_dict() for r in self.reports],
            "thresholds": [t.as_dict() for t in self.thresholds],
            "optimization": self.optimization.as_dict() if self.optimization is not None else None,
            "reproduction": [r.as_dict() for r in self.reproduction],
            "orderings": [o.as_dict() for o in self.orderings],
            "warnings": list(self.warnings),
            "wall_time": float(self.wall_time),
        }


def render_report(data: dict) -> bytes:
    serializer = RunReportSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return JSONRenderer().render(data, renderer_context={"indent": 2})


def parse_report(raw: bytes) -> dict:
    serializer = RunReportSerializer(data=JSONParser().parse(io.BytesIO(raw)))
    if not serializer.is_valid():
        raise ParseError(f"Invalid run report: {serializer.errors}")
    return serializer.validated_data


def fmt(value) -> str:
    """Fixed 6-significant-digit rendering for human tables."""
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def format_table(headers: list[str], rows: list[list]) -> str:
    cells = [[fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)
