import io
import logging
from pathlib import Path

import numpy as np
from rest_framework.exceptions import ParseError as DRFParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from separability.serializers import StateFileSerializer
from separability.services.errors import ParseError
from separability.services.linalg import DensityMatrix, validate_density

logger = logging.getLogger(__name__)

STATE_SUFFIX = ".state.json"


def _flatten_errors(errors, prefix: str = "") -> list[str]:
    if isinstance(errors, dict):
        out = []
        for key, value in errors.items():
            out.extend(_flatten_errors(value, f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(errors, list):
        if all(isinstance(e, str) for e in errors):
            return [f"{prefix}: {e}" for e in errors]
        out = []
        for i, value in enumerate(errors):
            if value:
                out.extend(_flatten_errors(value, f"{prefix}[{i}]"))
        return out
    return [f"{prefix}: {errors}"]


def load_state_payload(data: bytes, source: str = "<state>") -> DensityMatrix:
    try:
        payload = JSONParser().parse(io.BytesIO(data))
    except DRFParseError as exc:
        cause = exc.__context__
        raise ParseError(f"{source}: malformed JSON ({getattr(cause, 'msg', exc.detail)})",
                         line=getattr(cause, "lineno", None), column=getattr(cause, "colno", None))

    serializer = StateFileSerializer(data=payload)
    if not serializer.is_valid():
        raise ParseError(f"{source}: " + "; ".join(_flatten_errors(serializer.errors)))

    rows = serializer.validated_data["matrix"]
    mat = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    return validate_density(serializer.validated_data["dims"], mat)


def parse_state_file(path) -> DensityMatrix:
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ParseError(f"State file not found: {path}")
    rho = load_state_payload(data, source=str(path))
    logger.info("loaded %s with dims %s", path, list(rho.dims))
    return rho


def state_payload(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat],
    }


def write_state_file(rho: DensityMatrix, path) -> Path:
    path = Path(path)
    path.write_bytes(JSONRenderer().render(state_payload(rho), renderer_context={"indent": 2}))
    return path
