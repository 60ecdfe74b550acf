"""Batch runs over a directory of QDIMACS files with PAR-2 scoring."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .engine import Config, synthesize
from .formula import parse_qdimacs

log = logging.getLogger(__name__)

SUFFIXES = (".qdimacs", ".qdimacs.txt", ".cnf")
COUNT_FIELDS = ("unates", "unique", "learned", "repaired", "self_substituted")


@dataclass
class BenchRecord:
    instance: str
    status: str
    time: float
    counts: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def solved(self):
        return self.status.startswith("solved")


def par2(records: Iterable[BenchRecord], timeout: float) -> float | None:
    """Mean of the run time for solved instances and ``2 * timeout`` otherwise.

    Error rows are left out; ``None`` when nothing is left.
    """
    scores = [r.time if r.solved else 2 * timeout for r in records if r.status != "error"]
    if not scores:
        return None
    return sum(scores) / len(scores)


def run_instance(path: str | Path, cfg: Config) -> BenchRecord:
    path = Path(path)
    start = time.monotonic()
    try:
        spec = parse_qdimacs(path.read_bytes())
    except (OSError, ValueError, UnicodeDecodeError) as exc:
        return BenchRecord(path.name, "error", 0.0, error=str(exc))
    res = synthesize(spec, cfg)
    elapsed = time.monotonic() - start
    counts = {k: getattr(res.stats, k) for k in COUNT_FIELDS}
    return BenchRecord(path.name, res.stats.status, elapsed, counts)


def instances(directory: str | Path) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise NotADirectoryError(str(d))
    return sorted(p for p in d.iterdir() if p.is_file() and p.name.endswith(SUFFIXES))


def bench(
    directory: str | Path,
    cfg: Config,
    *,
    jobs: int = 1,
    runner: Callable[[Path, Config], BenchRecord] = run_instance,
) -> list[BenchRecord]:
    files = instances(directory)
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(runner, files, [cfg] * len(files)))
    else:
        records = [runner(f, cfg) for f in files]
    for r in records:
        if r.status == "error":
            log.warning("%s: excluded from PAR-2 (%s)", r.instance, r.error)
    return records


def to_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "status", "time", *COUNT_FIELDS])
    for r in records:
        w.writerow([r.instance, r.status, f"{r.time:.6f}", *(r.counts.get(k, "") for k in COUNT_FIELDS)])
    return buf.getvalue()
