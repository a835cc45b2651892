"""On-disk formats: instance JSON, solution JSONL, cluster/selection JSON, metrics CSV."""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .generators import problem_of, validate
from .sp import WeightedGraph
from .spp import SppInstance
from .tsp import TspInstance

FORMAT_VERSION = 1
METRIC_COLUMNS = (
    "algorithm", "Dmin", "Davg", "Dsp", "ns", "time_s",
    "Dmin_impr_pct", "Davg_impr_pct", "Dsp_impr_pct", "instance", "flag",
)


def _dump(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    return x


def instance_to_dict(inst):
    kind = problem_of(inst)
    doc = {"format": "scsframe-instance", "version": FORMAT_VERSION, "type": kind, "meta": _jsonable(inst.meta)}
    if isinstance(inst, WeightedGraph):
        doc.update(
            n=inst.n, s=inst.s, t=inst.t,
            edges=inst.edges.tolist(), weights=inst.weights.tolist(),
            coords=None if inst.coords is None else np.asarray(inst.coords).tolist(),
        )
    elif isinstance(inst, TspInstance):
        doc.update(points=inst.points.tolist())
    else:
        doc.update(n1=inst.n1, n2=inst.n2, rects=inst.rects.tolist(), costs=inst.costs.tolist())
    return doc


def instance_from_dict(doc):
    if doc.get("format") != "scsframe-instance":
        raise ValueError("not an instance document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported instance version {doc.get('version')}")
    kind = doc["type"]
    meta = doc.get("meta", {})
    if kind in ("sp-grid", "sp-eud", "sp-graph"):
        coords = doc.get("coords")
        inst = WeightedGraph(
            doc["n"], np.asarray(doc["edges"], dtype=np.int64).reshape(-1, 2),
            np.asarray(doc["weights"], dtype=np.float64), doc["s"], doc["t"],
            coords=None if coords is None else np.asarray(coords, dtype=np.float64),
            kind="graph" if kind == "sp-graph" else kind, meta=meta,
        )
    elif kind == "tsp":
        inst = TspInstance(np.asarray(doc["points"], dtype=np.float64), meta=meta)
    elif kind == "spp":
        inst = SppInstance(doc["n1"], doc["n2"], np.asarray(doc["rects"]), np.asarray(doc["costs"]), meta=meta)
    else:
        raise ValueError(f"unknown instance type {kind!r}")
    return validate(inst)


def save_instance(inst, path):
    _dump(instance_to_dict(inst), path)


def load_instance(path):
    return instance_from_dict(json.loads(Path(path).read_text()))


def _elem_out(elements):
    out = [list(e) if isinstance(e, tuple) else e for e in elements]
    return sorted(out)


def _elem_in(items):
    return frozenset(tuple(e) if isinstance(e, list) else e for e in items)


def save_solutions(path, solutions, elements, header=None):
    """One JSON record per line; the first line is a header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = {"format": "scsframe-solutions", "version": FORMAT_VERSION, "count": len(solutions)}
    head.update(_jsonable(header or {}))
    with path.open("w") as fh:
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for i, (s, e) in enumerate(zip(solutions, elements)):
            rec = {"i": i, "solution": [int(v) for v in s], "elements": _elem_out(e)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_solutions(path):
    """Returns (header, solutions, element sets)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty solutions file")
    head = json.loads(lines[0])
    if head.get("format") != "scsframe-solutions":
        raise ValueError(f"{path}: not a solutions file")
    sols, elems = [], []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        rec = json.loads(ln)
        sols.append(rec["solution"])
        elems.append(_elem_in(rec["elements"]))
    if head.get("count", len(sols)) != len(sols):
        raise ValueError(f"{path}: header says {head['count']} records, found {len(sols)}")
    return head, sols, elems


def save_json(obj, path):
    _dump(_jsonable(obj), path)


def load_json(path):
    return json.loads(Path(path).read_text())


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{float(x):.10g}"


def write_metrics(path, rows):
    """Metrics CSV with the fixed column order; NaN and missing values are blank."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for r in rows:
            impr = r.impr or {}
            w.writerow([
                r.algorithm, _fmt(r.Dmin), _fmt(r.Davg), _fmt(r.Dsp), _fmt(r.ns), _fmt(r.time_s),
                _fmt(impr.get("Dmin")), _fmt(impr.get("Davg")), _fmt(impr.get("Dsp")),
                r.instance, r.flag,
            ])


def read_metrics(path):
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
