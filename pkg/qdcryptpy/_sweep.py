# -*- coding: utf-8 -*-
import csv
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from sys import stdout
from typing import IO, Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
from google.protobuf.json_format import MessageToDict
from google.protobuf.struct_pb2 import Struct

from qdcryptpy._errors import ConfigError

logger = logging.getLogger(__name__)


def _plain(v: Any) -> Any:
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def _cell(v: Any) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class SweepResult:
    """
    Rows of one sweep plus the metadata that makes the file self-describing.
    It has various output manipulations.
    """

    def __init__(self, columns: Sequence[str], rows: Iterable[Sequence[Any]],
                 metadata: Optional[Dict[str, Any]] = None):
        """
        constructor.
        :param columns: column names, the first one is the sweep variable.
        :param rows: one sequence of values per sweep point.
        :param metadata: config echo, toolkit version and assumption log.
        """
        if not columns:
            raise ValueError("columns must be provided!")
        self.columns = list(columns)
        self.rows = [[_plain(v) for v in r] for r in rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r} does not match columns {self.columns}")
        self.metadata: Dict[str, Any] = dict(metadata or {})

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def msg(self) -> Struct:
        """
        Protobuf Struct holding metadata and rows.
        """
        s = Struct()
        s.update({
            "metadata": {k: _plain(v) if isinstance(_plain(v), (bool, int, float)) else str(v)
                         for k, v in self.metadata.items()},
            "columns": self.columns,
            "rows": [[_plain(v) for v in r] for r in self.rows],
        })
        return s

    def as_json(self):
        """
        convert the message to a json object.
        :return: Json Object
        """
        return MessageToDict(self.msg())

    def as_json_str(self) -> str:
        """
        a json string representing the sweep.
        :return: json string
        """
        return json.dumps(self.as_json(), ensure_ascii=False, indent=2)

    def print_as_json(self, out: IO = stdout):
        """
        print the sweep
        :param out: File, if nothing provided, sys.stdout is used.
        :return: None
        """
        json.dump(self.as_json(), out, ensure_ascii=False, indent=2)

    def to_csv(self) -> str:
        """``#`` metadata lines, then a header row and one line per point."""
        buf = io.StringIO()
        for k in sorted(self.metadata):
            buf.write(f"# {k}: {self.metadata[k]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        return buf.getvalue()

    def write_csv(self, path: str) -> str:
        """Write next to ``path`` then rename over it, so readers never see half a file."""
        path = os.path.abspath(path)
        d = os.path.dirname(path)
        os.makedirs(d, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".qdcrypt-", suffix=".csv.tmp", dir=d)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(self.to_csv())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.info("wrote %d rows to %s", len(self.rows), path)
        return path


def sweep_grid(lo: float, hi: float, steps: int) -> List[float]:
    """``steps`` evenly spaced points from lo to hi inclusive."""
    if steps < 2:
        raise ConfigError(f"a sweep needs at least 2 steps, got {steps}")
    if not hi > lo:
        raise ConfigError(f"sweep maximum {hi} must exceed minimum {lo}")
    return [float(v) for v in np.linspace(lo, hi, steps)]


def parallel_map(fn: Callable[[Any], Any], points: Sequence[Any], workers: int = 1) -> List[Any]:
    """
    ``[fn(p) for p in points]``, spread over processes when workers > 1.

    ``fn`` must be picklable (a module-level function or a partial of one).
    Results come back in input order.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    points = list(points)
    if workers == 1 or len(points) < 2:
        return [fn(p) for p in points]
    logger.debug("mapping %d points over %d workers", len(points), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))
