"""Check records, experiment reports and atomic file output."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Sequence

import numpy as np


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by the seed and a path of integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def json_safe(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [json_safe(v) for v in x]
    if isinstance(x, np.ndarray):
        return json_safe(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.complexfloating, complex)):
        return [json_safe(x.real), json_safe(x.imag)]
    return x


@dataclasses.dataclass
class CheckRecord:
    name: str
    inputs: dict[str, Any]
    computed: float
    bound: float | None
    relation: str
    passed: bool

    @property
    def margin(self) -> float | None:
        if self.bound is None:
            return None
        if self.relation == ">=":
            return self.computed - self.bound
        return self.bound - self.computed

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["margin"] = self.margin
        return json_safe(d)


def check(name: str, computed: float, relation: str, bound: float | None, **inputs) -> CheckRecord:
    computed = float(computed)
    if relation == "<=":
        ok = computed <= bound
    elif relation == ">=":
        ok = computed >= bound
    elif relation == "==":
        ok = computed == bound
    elif relation == "true":
        ok = bool(computed)
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return CheckRecord(name, inputs, computed, None if bound is None else float(bound), relation, bool(ok))


@dataclasses.dataclass
class ExperimentReport:
    command: str
    config: dict[str, Any]
    checks: list[CheckRecord] = dataclasses.field(default_factory=list)
    tables: dict[str, list[dict[str, Any]]] = dataclasses.field(default_factory=dict)
    results: dict[str, Any] = dataclasses.field(default_factory=dict)
    wall_times: dict[str, float] = dataclasses.field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        from . import __version__

        return json_safe(
            {
                "command": self.command,
                "version": __version__,
                "config": self.config,
                "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks],
                "results": self.results,
                "tables": self.tables,
                "wall_times": self.wall_times,
            }
        )

    def write(self, out: str | Path) -> list[Path]:
        """Write ``out`` (JSON) plus one CSV per table and one for the checks."""
        out = Path(out)
        written = [out]
        atomic_write(out, json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n")
        tables = {"checks": [_flatten(c.to_dict()) for c in self.checks], **self.tables}
        for name, rows in tables.items():
            if not rows:
                continue
            path = out.with_name(f"{out.stem}.{name}.csv")
            atomic_write(path, _csv(rows))
            written.append(path)
        return written


def _flatten(d: dict[str, Any]) -> dict[str, Any]:
    flat = {k: v for k, v in d.items() if k != "inputs"}
    flat["inputs"] = json.dumps(d.get("inputs", {}), sort_keys=True)
    return flat


def _csv(rows: Sequence[dict[str, Any]]) -> str:
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json_safe(v) for k, v in r.items()})
    return buf.getvalue()


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
