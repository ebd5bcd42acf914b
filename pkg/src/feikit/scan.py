"""Corpus scans: run the inequality checks over many functions.

Records keep a fixed key order so JSON and CSV output is byte-stable for a
given configuration. Keys ending in ``_holds`` are proved inequalities and
must always be true; ratio keys are reported without any verdict.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .certificates import fmei_holds, min_parity_certificate
from .core import (BooleanFunction, influences_exact, min_entropy, renyi_entropy, shannon_entropy,
                   total_influence_exact, variance_exact, wht)
from .errors import ConfigError, FeikitError
from .io import parse_truth_table
from .lp import verify_minentropy_vs_norm
from .partitions import heuristic_partition, min_aUC_exact, verify_partition

SCHEMA = "feikit.scan/1"
TOL = 1e-9

CHECKS = (
    "fei_ratio",
    "fmei_ratio",
    "minentropy_vs_cmin_parity",
    "entropy_vs_aUC",
    "entropy_vs_aUC_parity",
    "granularity",
    "renyi_chain",
    "lp_minentropy",
    "kkl_ratio",
)

# CSV columns contributed by each check, in output order
COLUMNS = {
    "fei_ratio": ("entropy", "influence", "fei_ratio"),
    "fmei_ratio": ("min_entropy", "influence", "fmei_ratio"),
    "minentropy_vs_cmin_parity": ("min_entropy", "cmin_parity", "fmei_parity_holds"),
    "entropy_vs_aUC": ("entropy", "auc", "auc_exact", "entropy_vs_auc_holds"),
    "entropy_vs_aUC_parity": ("entropy", "auc_parity", "entropy_vs_auc_parity_holds", "fei_auc_parity_holds"),
    "granularity": ("parseval_holds", "granularity_holds"),
    "renyi_chain": ("renyi_chain_holds",),
    "lp_minentropy": ("lp_norm", "lp_minentropy_holds"),
    "kkl_ratio": ("kkl_max_influence", "kkl_ratio"),
}

EXHAUSTIVE_N_MAX = 4
RANDOM_N_MAX = 16


@dataclass
class ScanConfig:
    n: int | None = None
    mode: str = "exhaustive"
    count: int = 100
    seed: int = 0
    path: str | None = None
    checks: tuple = CHECKS
    output: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.mode not in ("exhaustive", "random", "file"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"unknown checks {unknown}; choose from {list(CHECKS)}")
        if not self.checks:
            raise ConfigError("select at least one check")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.mode == "exhaustive":
            if self.n is None or not 1 <= self.n <= EXHAUSTIVE_N_MAX:
                raise ConfigError(f"exhaustive mode needs 1 <= n <= {EXHAUSTIVE_N_MAX}")
        elif self.mode == "random":
            if self.n is None or not 1 <= self.n <= RANDOM_N_MAX:
                raise ConfigError(f"random mode needs 1 <= n <= {RANDOM_N_MAX}")
            if self.count < 1:
                raise ConfigError("random mode needs count >= 1")
        elif not self.path:
            raise ConfigError("file mode needs a path")

    def ordered_checks(self) -> tuple:
        return tuple(c for c in CHECKS if c in self.checks)

    def to_json(self) -> dict:
        out = {"mode": self.mode, "n": self.n, "checks": list(self.ordered_checks())}
        if self.mode == "random":
            out.update(count=self.count, seed=self.seed)
        if self.mode == "file":
            out["path"] = self.path
        return out


@dataclass
class ScanReport:
    config: dict
    records: list
    summary: dict
    columns: list
    runtime: dict = field(default_factory=dict)

    def violations(self) -> list:
        return [(r["id"], k) for r in self.records for k, v in r.items() if k.endswith("_holds") and v is False]

    def to_json(self, timing: bool = False) -> dict:
        out = {"schema": SCHEMA, "config": self.config, "columns": self.columns,
               "records": self.records, "summary": self.summary}
        if timing:
            out["runtime"] = self.runtime
        return out

    @classmethod
    def from_json(cls, data) -> "ScanReport":
        if data.get("schema") != SCHEMA:
            raise ConfigError(f"unsupported report schema {data.get('schema')!r}")
        return cls(data["config"], data["records"], data["summary"], data["columns"], data.get("runtime", {}))


def columns_for(checks) -> list:
    cols = ["id", "n", "table", "constant"]
    for c in CHECKS:
        if c in checks:
            cols += [k for k in COLUMNS[c] if k not in cols]
    return cols + ["errors"]


def _functions(config: ScanConfig):
    """List of (id, n, packed table int)."""
    if config.mode == "exhaustive":
        n = config.n
        width = max(1, (1 << n) // 4)
        return [(format(v, f"0{width}x"), n, v) for v in range(1 << (1 << n))]
    if config.mode == "random":
        rng = np.random.default_rng(config.seed)
        n = config.n
        out = []
        for i in range(config.count):
            bits = rng.integers(0, 2, size=1 << n, dtype=np.uint8)
            out.append((f"r{i}", n, BooleanFunction(n, bits).to_int()))
        return out
    try:
        with open(config.path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {config.path}: {exc}") from None
    chunks, cur = [], []
    for line in text.splitlines():
        if line.replace(" ", "").startswith("n="):
            if cur:
                chunks.append("\n".join(cur))
            cur = [line]
        elif line.strip() and not line.lstrip().startswith("#"):
            if not cur:
                raise ConfigError("function file must start with a header line 'n=<k>'")
            cur.append(line)
    if cur:
        chunks.append("\n".join(cur))
    if not chunks:
        raise ConfigError(f"{config.path} holds no functions")
    out = []
    for i, chunk in enumerate(chunks):
        f = parse_truth_table(chunk)
        out.append((f"f{i}", f.n, f.to_int()))
    return out


def _num(x: float):
    """JSON-safe float: infinities become strings."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def scan_one(fid: str, n: int, value: int, checks) -> dict:
    f = BooleanFunction.from_int(n, value)
    s = wht(f)
    rec = {"id": fid, "n": n, "table": f.to_hex() if n <= 8 else None, "constant": f.is_constant()}
    errors = []
    H = shannon_entropy(s)
    Hinf = min_entropy(s)
    inf_exact = total_influence_exact(s)
    inf = float(inf_exact)
    for check in CHECKS:
        if check not in checks:
            continue
        try:
            _run_check(check, rec, f, s, H, Hinf, inf, inf_exact)
        except FeikitError as exc:
            errors.append(f"{check}: {type(exc).__name__}: {exc}")
            for k in COLUMNS[check]:
                rec.setdefault(k, None)
    rec["errors"] = errors
    return rec


def _run_check(check, rec, f, s, H, Hinf, inf, inf_exact):
    const = rec["constant"]
    if check == "fei_ratio":
        rec["entropy"] = H
        rec["influence"] = inf
        rec["fei_ratio"] = None if const else H / inf
    elif check == "fmei_ratio":
        rec["min_entropy"] = Hinf
        rec["influence"] = inf
        rec["fmei_ratio"] = None if const else Hinf / inf
    elif check == "minentropy_vs_cmin_parity":
        k = min_parity_certificate(f, s)
        rec["min_entropy"] = Hinf
        rec["cmin_parity"] = k
        rec["fmei_parity_holds"] = fmei_holds(s.max_abs, f.n, k)
    elif check == "entropy_vs_aUC":
        if f.n <= 4:
            auc, _ = min_aUC_exact(f)
            rec["auc_exact"] = True
        else:
            auc = verify_partition(f, heuristic_partition(f, "subcube"))
            rec["auc_exact"] = False
        rec["entropy"] = H
        rec["auc"] = str(auc)
        rec["entropy_vs_auc_holds"] = H <= 2 * float(auc) + TOL
    elif check == "entropy_vs_aUC_parity":
        auc = verify_partition(f, heuristic_partition(f, "affine"))
        rec["entropy"] = H
        rec["auc_parity"] = str(auc)
        rec["entropy_vs_auc_parity_holds"] = H <= 2 * float(auc) + TOL
        rec["fei_auc_parity_holds"] = H <= 2 * float(auc) * inf + TOL if inf_exact >= 1 else None
    elif check == "granularity":
        rec["parseval_holds"] = s.parseval_ok()
        rec["granularity_holds"] = s.granularity_ok()
    elif check == "renyi_chain":
        rec["renyi_chain_holds"] = renyi_chain_holds(s)
    elif check == "lp_minentropy":
        _, rhs, holds = verify_minentropy_vs_norm(f, 0)
        rec["lp_norm"] = 2 ** (rhs / 2)
        rec["lp_minentropy_holds"] = holds
    elif check == "kkl_ratio":
        if const:
            rec["kkl_max_influence"] = 0.0
            rec["kkl_ratio"] = None
        else:
            mx = max(influences_exact(s))
            rec["kkl_max_influence"] = float(mx)
            if mx >= 1:
                rec["kkl_ratio"] = "inf"
            else:
                rec["kkl_ratio"] = inf / (float(variance_exact(s)) * math.log2(1 / mx))


def renyi_chain_holds(s, tol: float = TOL) -> bool:
    """``H_inf <= H_3 <= H_2 <= H_1.5 <= H <= H_0.5 <= H_0`` and
    ``H_{1+d} <= (1 + 1/d) H_inf`` for d in (0.5, 1, 2)."""
    Hinf = min_entropy(s)
    chain = [Hinf] + [renyi_entropy(s, a) for a in (3.0, 2.0, 1.5, 1.0, 0.5, 0.0)]
    ok = all(a <= b + tol for a, b in zip(chain, chain[1:]))
    for d in (0.5, 1.0, 2.0):
        ok = ok and renyi_entropy(s, 1 + d) <= (1 + 1 / d) * Hinf + tol
    return ok


def _scan_chunk(args):
    items, checks = args
    return [scan_one(fid, n, v, checks) for fid, n, v in items]


def _summarize(records) -> dict:
    def best(key):
        top, who = None, None
        for r in records:
            v = r.get(key)
            if r["constant"] or not isinstance(v, float):
                continue
            if top is None or v > top:
                top, who = v, r["id"]
        return {"value": top, "witness": who}

    summary = {
        "records": len(records),
        "constants": [r["id"] for r in records if r["constant"]],
        "violations": sum(1 for r in records for k, v in r.items() if k.endswith("_holds") and v is False),
        "errors": sum(1 for r in records if r["errors"]),
    }
    if any("fei_ratio" in r for r in records):
        summary["max_fei_ratio"] = best("fei_ratio")
    if any("fmei_ratio" in r for r in records):
        summary["max_fmei_ratio"] = best("fmei_ratio")
    if any("kkl_ratio" in r for r in records):
        finite = [r for r in records if isinstance(r.get("kkl_ratio"), float)]
        low = min(finite, key=lambda r: r["kkl_ratio"], default=None)
        summary["min_kkl_ratio"] = {"value": low["kkl_ratio"] if low else None, "witness": low["id"] if low else None}
    return summary


def scan(config: ScanConfig, threads: int = 1, chunk: int = 256) -> ScanReport:
    """Run the configured checks; the merge is in input order for determinism."""
    config.validate()
    checks = config.ordered_checks()
    t0 = time.perf_counter()
    items = _functions(config)
    batches = [(items[i:i + chunk], checks) for i in range(0, len(items), chunk)]
    if threads > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_scan_chunk, batches))
    else:
        parts = [_scan_chunk(b) for b in batches]
    records = [r for part in parts for r in part]
    for r in records:
        for k, v in list(r.items()):
            r[k] = _num(v)
    report = ScanReport(config.to_json(), records, _summarize(records), columns_for(checks))
    report.runtime = {"seconds": time.perf_counter() - t0, "threads": threads, "functions": len(records)}
    return report


def render(report: ScanReport, fmt: str = "json", timing: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(timing), indent=1) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for r in report.records:
            row = []
            for col in report.columns:
                v = r.get(col)
                if col == "errors":
                    v = "; ".join(v or [])
                elif v is None:
                    v = ""
                elif isinstance(v, float):
                    v = repr(v)
                row.append(v)
            w.writerow(row)
        return buf.getvalue()
    raise ConfigError(f"unknown format {fmt!r}")


def report_render(report: ScanReport, fmt: str, path=None, timing: bool = False) -> str:
    text = render(report, fmt, timing)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text
