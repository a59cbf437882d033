"""Condition-number sweeps over the test families and their CSV output."""

import csv
import io
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .bgs import (
    VARIANTS,
    BlockPartition,
    loss_of_orthogonality,
    qr_residual,
    run_variant,
)
from .densela import BreakdownError, cond2
from .precision import F32F64, PrecisionPair
from .testmats import GluedParams, LaeuchliParams, MonomialParams, generate

__all__ = [
    "StabilityRecord",
    "SweepSpec",
    "CSV_HEADER",
    "reference_bounds",
    "default_params",
    "default_sweep",
    "run_sweep",
    "emit_csv",
    "format_csv",
    "read_csv",
    "parse_csv",
]

CSV_HEADER = (
    "variant", "family", "sweep_param", "kappa", "loo", "residual", "sync_events",
    "m", "p", "s", "seed", "bound_u_kappa", "bound_u_kappa2",
)

DEFAULT_VARIANTS = tuple(VARIANTS)


def reference_bounds(kappa, u):
    """The plotted ``u*kappa`` and ``u*kappa**2`` levels (constants fixed at 1)."""
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if u <= 0:
        raise ValueError(f"u must be positive, got {u}")
    return u * kappa, u * kappa * kappa


@dataclass
class StabilityRecord:
    variant: str
    family: str
    sweep_param: float
    kappa: float
    loo: float
    residual: float
    sync_events: int
    m: int
    p: int
    s: int
    seed: int
    bound_u_kappa: float
    bound_u_kappa2: float
    breakdown_block: Optional[int] = None

    @property
    def breakdown(self):
        return self.breakdown_block is not None

    def __eq__(self, other):
        # NaN-aware so that breakdown rows survive a CSV round trip
        if not isinstance(other, StabilityRecord):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
                continue
            if a != b:
                return False
        return True


@dataclass
class SweepSpec:
    family: str
    params: list
    variants: tuple = DEFAULT_VARIANTS
    pair: PrecisionPair = F32F64
    out: Optional[Path] = None

    def __post_init__(self):
        if not self.params:
            raise ValueError("sweep needs at least one parameter point")
        if not self.variants:
            raise ValueError("sweep needs at least one variant")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown:
            raise ValueError(f"unknown variants: {', '.join(unknown)}")
        wrong = [p for p in self.params if p.family != self.family]
        if wrong:
            raise ValueError(f"{self.family} sweep got {wrong[0].family} parameters")


LAEUCHLI_ETAS = tuple(np.logspace(-1, -8, 10))
MONOMIAL_SVEC = (2, 4, 6, 8, 10, 12)
GLUED_SVEC = tuple(range(1, 13))


def default_params(family, seed=0):
    """Default parameter lists, scaled so the kappa range suits binary32."""
    if family == "laeuchli":
        return [LaeuchliParams(1000, 100, 5, float(eta)) for eta in LAEUCHLI_ETAS]
    if family == "monomial":
        return [MonomialParams(1000, 240 // s, s, seed) for s in MONOMIAL_SVEC]
    if family == "glued":
        return [GluedParams.from_svec(1000, 50, 4, v, seed) for v in GLUED_SVEC]
    raise ValueError(f"unknown family {family!r}")


def default_sweep(family, seed=0, variants=DEFAULT_VARIANTS, pair=F32F64, out=None):
    return SweepSpec(family, default_params(family, seed), tuple(variants), pair, out)


def _measure(variant, x, part, kappa, params, pair):
    u = pair.working_unit_roundoff
    b1, b2 = reference_bounds(kappa, u)
    common = dict(
        variant=variant, family=params.family, sweep_param=float(params.sweep_param),
        kappa=float(kappa), m=part.m, p=part.p, s=part.s, seed=int(params.seed),
        bound_u_kappa=b1, bound_u_kappa2=b2,
    )
    try:
        res = run_variant(variant, x, part, pair)
    except BreakdownError as exc:
        return StabilityRecord(
            loo=math.nan, residual=math.nan, sync_events=exc.sync_events,
            breakdown_block=exc.block, **common,
        )
    return StabilityRecord(
        loo=loss_of_orthogonality(res.Q),
        residual=qr_residual(x, res.Q, res.R),
        sync_events=res.sync_events,
        **common,
    )


def run_sweep(spec, progress=None):
    """Run every variant on every parameter point of ``spec``.

    Breakdowns become flagged records. Records come back ordered by
    parameter point (in the order given) and then variant; the condition
    number of each matrix is measured once, in binary64.
    """
    order = {v: i for i, v in enumerate(spec.variants)}
    keyed = []
    for ip, params in enumerate(spec.params):
        x = generate(params, spec.pair.working)
        part = BlockPartition(params.m, params.p, params.s)
        kappa = cond2(x)
        for variant in spec.variants:
            rec = _measure(variant, x, part, kappa, params, spec.pair)
            keyed.append(((rec.family, ip, order[variant]), rec))
            if progress is not None:
                progress(rec)
    records = [rec for _, rec in sorted(keyed, key=lambda kr: kr[0])]
    if spec.out is not None:
        emit_csv(records, spec.out)
    return records


def _fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "NaN"
    return repr(value)


def format_csv(records):
    """CSV text for ``records``; a ``note`` column appears only with breakdowns."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    with_note = any(r.breakdown for r in records)
    header = list(CSV_HEADER) + (["note"] if with_note else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in records:
        row = [r.variant, r.family] + [_fmt(getattr(r, name)) for name in CSV_HEADER[2:]]
        if with_note:
            row.append(f"breakdown_block={r.breakdown_block}" if r.breakdown else "")
        writer.writerow(row)
    return buf.getvalue()


def emit_csv(records, path):
    path = Path(path)
    text = format_csv(records)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path}: {exc}") from exc
    return path


_INT_FIELDS = {"sync_events", "m", "p", "s", "seed"}


def parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header[:len(CSV_HEADER)]) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {','.join(header)}")
    records = []
    for row in reader:
        values = dict(zip(header, row))
        kwargs = {}
        for name in CSV_HEADER:
            raw = values[name]
            if name in ("variant", "family"):
                kwargs[name] = raw
            elif name in _INT_FIELDS:
                kwargs[name] = int(raw)
            else:
                kwargs[name] = float(raw)
        note = values.get("note", "")
        if note.startswith("breakdown_block="):
            block = note.split("=", 1)[1]
            kwargs["breakdown_block"] = None if block == "None" else int(block)
        records.append(StabilityRecord(**kwargs))
    return records


def read_csv(path):
    with open(path, newline="") as fh:
        return parse_csv(fh.read())
