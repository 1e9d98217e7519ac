"""
Data-driven regeneration of the published reference numbers.

Each check in the reference-value file names how to recompute its number (a threshold
scan, a lower bound, or a closed-form comparison) or marks it as reference-only. Checks run
on a thread pool capped by the ``THREADS`` setting; row order follows the file.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from rest_framework.parsers import JSONParser

from separability.conf import setting
from separability.serializers import ReferenceValuesSerializer
from separability.services.criteria import ParamPair, threshold_scan
from separability.services.errors import BadConfig, ParseError
from separability.services.measures import concurrence_lower_bound, cren_lower_bound
from separability.services.multipartite import gme_concurrence_lower_bound, resolve_criterion
from separability.services.states import builtin_state, ghz_noise, state_family

logger = logging.getLogger(__name__)

DEFAULT_VALUES = Path(__file__).resolve().parent.parent / "data" / "reference_values.json"

GHZ_PRINTED_OFFSET = 17.0 * math.sqrt(2.0) / 6.0
GHZ_CORRECTED_OFFSET = 20.0 * math.sqrt(2.0) / 6.0


def number(value) -> float:
    """Numbers in the data file may be plain, ``"a/b"`` or ``"sqrt(x)"``."""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("sqrt(") and text.endswith(")"):
            return math.sqrt(float(Fraction(text[5:-1])))
        return float(Fraction(text))
    return float(value)


def _vector(values) -> list[float]:
    return [number(v) for v in values]


def ghz_closed_form(x: float, offset: float) -> float:
    """Closed-form GME bound for the GHZ-noise family with ``mu=(1,2)``, ``nu=(2,1)``."""
    return 3.0 * math.sqrt(2.0) * (1.0 - x) / 4.0 + math.sqrt(11.0 * (x * x - 2.0 * x + 22.0)) / 4.0 - offset


@dataclass(frozen=True)
class ReproductionRow:
    example: int
    key: str
    label: str
    paper: float
    computed: float | None
    tol: float
    location: str
    note: str = ""
    informational: bool = False

    @property
    def delta(self) -> float | None:
        return None if self.computed is None else abs(self.computed - self.paper)

    @property
    def ok(self) -> bool | None:
        return None if self.computed is None else self.delta <= self.tol

    @property
    def is_deviation(self) -> bool:
        return not self.informational and self.ok is False

    @property
    def value(self) -> float:
        """Computed value when there is one, otherwise the printed reference."""
        return self.paper if self.computed is None else self.computed

    def as_dict(self) -> dict:
        return {
            "example": self.example,
            "key": self.key,
            "label": self.label,
            "paper": float(self.paper),
            "computed": None if self.computed is None else float(self.computed),
            "delta": None if self.delta is None else float(self.delta),
            "tol": float(self.tol),
            "ok": self.ok,
            "informational": self.informational,
            "location": self.location,
            "note": self.note,
        }


@dataclass(frozen=True)
class OrderingRow:
    example: int
    left: str
    relation: str
    right: str
    left_value: float
    right_value: float

    @property
    def ok(self) -> bool:
        if self.relation == "<":
            return self.left_value < self.right_value
        return self.left_value > self.right_value

    def as_dict(self) -> dict:
        return {
            "example": self.example,
            "left": self.left,
            "relation": self.relation,
            "right": self.right,
            "left_value": float(self.left_value),
            "right_value": float(self.right_value),
            "ok": self.ok,
        }


@dataclass(frozen=True)
class Reproduction:
    rows: tuple[ReproductionRow, ...]
    orderings: tuple[OrderingRow, ...]
    warnings: tuple[str, ...]

    @property
    def deviations(self) -> list[str]:
        out = [f"{r.key}: computed {r.computed:.6g} vs {r.paper:.6g} (|delta| {r.delta:.2e} > {r.tol:g})"
               for r in self.rows if r.is_deviation]
        out.extend(f"ordering {o.left} {o.relation} {o.right} fails ({o.left_value:.6g} vs {o.right_value:.6g})"
                   for o in self.orderings if not o.ok)
        return out


def load_reference_values(path=None) -> list[dict]:
    path = Path(path or setting("REFERENCE_VALUES") or DEFAULT_VALUES)
    try:
        raw = path.open("rb")
    except FileNotFoundError:
        raise ParseError(f"Reference value file not found: {path}")
    with raw:
        serializer = ReferenceValuesSerializer(data=JSONParser().parse(raw))
    if not serializer.is_valid():
        raise ParseError(f"Invalid reference value file {path}: {serializer.errors}")
    return serializer.validated_data["examples"]


def _criterion(compute: dict):
    name = compute["criterion"]
    params = None
    if "mu" in compute:
        params = ParamPair(_vector(compute["mu"]), _vector(compute["nu"]))
    return resolve_criterion(
        name,
        params=params,
        alpha=number(compute["alpha"]) if "alpha" in compute else None,
        beta=number(compute["beta"]) if "beta" in compute else None,
        l=int(compute["l"]) if "l" in compute else None,
    )


def _compute(check: dict, tol: float | None) -> tuple[float | None, float | None]:
    """Return ``(computed, reference override)`` for one check."""
    compute = check["compute"]
    kind = compute["kind"]
    if kind == "reference":
        return None, None

    if kind == "threshold":
        family = state_family(compute["family"], **{k: number(v) for k, v in compute.get("fixed", {}).items()})
        result = threshold_scan(family, _criterion(compute), number(compute["lo"]), number(compute["hi"]), tol)
        return result.threshold, None

    if kind == "bound":
        rho = builtin_state(compute["state"], _vector(compute.get("params", [])))
        p = ParamPair(_vector(compute["mu"]), _vector(compute["nu"]))
        measure = {"concurrence": concurrence_lower_bound, "cren": cren_lower_bound,
                   "gme": gme_concurrence_lower_bound}[compute["measure"]]
        return measure(rho, p).bound, None

    if kind == "closed_form":
        x = number(compute["x"])
        p = ParamPair(_vector(compute["mu"]), _vector(compute["nu"]))
        direct = gme_concurrence_lower_bound(ghz_noise(x), p).bound
        offset = GHZ_PRINTED_OFFSET if compute["constant"] == "printed" else GHZ_CORRECTED_OFFSET
        return direct, ghz_closed_form(x, offset)

    raise BadConfig(f"Unknown compute kind {kind!r}.")


def _row(example: int, check: dict, tol: float | None) -> ReproductionRow:
    computed, override = _compute(check, tol)
    paper = override if override is not None else check["value"]
    note = check.get("note", "")
    if check["compute"]["kind"] == "closed_form" and computed is not None and abs(computed - paper) > check["tol"]:
        note = note or "closed form disagrees with direct evaluation"
    return ReproductionRow(
        example=example,
        key=check["key"],
        label=check["label"],
        paper=paper,
        computed=computed,
        tol=check["tol"],
        location=check["location"],
        note=note,
        informational=check.get("informational", False),
    )


def reproduce(examples: list[int] | None = None, *, path=None, tol: float | None = None,
              threads: int | None = None) -> Reproduction:
    data = load_reference_values(path)
    known = {e["example"] for e in data}
    selected = sorted(known) if not examples else list(examples)
    unknown = set(selected) - known
    if unknown:
        raise BadConfig(f"Unknown example(s) {sorted(unknown)}; known: {sorted(known)}.")

    chosen = [e for e in data if e["example"] in selected]
    jobs = [(e["example"], check) for e in chosen for check in e["checks"]]
    workers = max(1, int(threads or setting("THREADS")))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(lambda job: _row(job[0], job[1], tol), jobs))

    by_key = {r.key: r for r in rows}
    orderings = []
    warnings = []
    for e in chosen:
        for left, relation, right in e.get("orderings", []):
            orderings.append(OrderingRow(e["example"], left, relation, right,
                                         by_key[left].value, by_key[right].value))
        warnings.extend(f"example {e['example']}: {w}" for w in e.get("warnings", []))

    for r in rows:
        if r.informational and r.ok is False:
            warnings.append(f"example {r.example}: {r.label}: {r.note} "
                            f"(direct {r.computed:.6g}, formula {r.paper:.6g})")

    for w in warnings:
        logger.warning(w)
    return Reproduction(rows=tuple(rows), orderings=tuple(orderings), warnings=tuple(warnings))
