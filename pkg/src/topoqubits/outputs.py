"""Deterministic table, JSON, and SVG emitters plus run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import os
import platform
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__

FLOAT_FMT = ".17g"


@dataclass
class Table:
    """Column-named 2-D table; column 0 is the sweep/time variable."""

    columns: list[str]
    data: np.ndarray

    def __post_init__(self):
        self.data = np.atleast_2d(np.asarray(self.data, dtype=float))
        if self.data.size == 0:
            self.data = self.data.reshape(0, len(self.columns))
        if self.data.shape[1] != len(self.columns):
            raise ValueError(
                f"table has {self.data.shape[1]} columns but {len(self.columns)} names"
            )

    @classmethod
    def from_columns(cls, **cols) -> "Table":
        names = list(cols)
        return cls(names, np.column_stack([np.asarray(cols[n], dtype=float) for n in names]))

    @property
    def empty(self) -> bool:
        return self.data.shape[0] == 0


def numbered(prefix: str, n: int, start: int = 0) -> list[str]:
    width = max(2, len(str(start + n - 1)))
    return [f"{prefix}_{k:0{width}d}" for k in range(start, start + n)]


def write_csv(table: Table, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.data:
            w.writerow([format(float(x), FLOAT_FMT) for x in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(obj, path: Path) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return path


def emit_plot(
    table: Table,
    kind: str,
    path: Path,
    *,
    title: str = "",
    xlabel: str | None = None,
    ylabel: str = "",
) -> Path:
    """Line plot (column 0 against the rest) or heat map (rows x columns 1..n)."""
    if table.empty:
        raise ValueError("cannot plot an empty table")
    if kind not in ("line", "heatmap"):
        raise ValueError(f"unknown plot kind {kind!r}")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "topoqubits", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        x = table.data[:, 0]
        ys = table.data[:, 1:]
        if kind == "line":
            for j in range(ys.shape[1]):
                ax.plot(x, ys[:, j], lw=1.0, label=table.columns[j + 1])
            if ys.shape[1] <= 6:
                ax.legend(fontsize=7)
            ax.set_ylabel(ylabel)
        else:
            n = ys.shape[1]
            im = ax.imshow(
                ys.T, aspect="auto", origin="lower", interpolation="nearest",
                extent=(x[0], x[-1], 0.5, n + 0.5), cmap="viridis",
            )
            fig.colorbar(im, ax=ax, label=ylabel)
            ax.set_ylabel("site")
            ax.set_yticks(range(1, n + 1, max(1, n // 14)))
        ax.set_xlabel(xlabel or table.columns[0])
        if title:
            ax.set_title(title)
        fig.tight_layout()
        tmp = Path(str(path) + ".part")
        try:
            fig.savefig(tmp, format="svg", metadata={"Date": None, "Creator": None})
            os.replace(tmp, path)
        finally:
            plt.close(fig)
            if tmp.exists():
                tmp.unlink()
    return path


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


class OutputSet:
    """Collects files written into a staging directory."""

    def __init__(self, root: Path, formats):
        self.root = root
        self.formats = set(formats)
        self.files: list[str] = []
        self.warnings: list[str] = []

    def table(self, name: str, table: Table, plot: str | None = None, **plot_kw) -> None:
        if "csv" in self.formats:
            self.files.append(write_csv(table, self.root / f"{name}.csv").name)
        if plot and "svg" in self.formats:
            self.files.append(emit_plot(table, plot, self.root / f"{name}.svg", **plot_kw).name)

    def json(self, name: str, obj) -> None:
        if "json" in self.formats:
            self.files.append(write_json(obj, self.root / f"{name}.json").name)

    def warn(self, message: str) -> None:
        self.warnings.append(message)


@contextmanager
def staged_output(target: Path):
    """Yield a temp dir next to ``target``; on success it replaces ``target``."""
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    if target.exists():
        shutil.rmtree(target)
    os.replace(tmp, target)


def build_manifest(config: dict, seed: int, generator: str, outputs: OutputSet,
                   duration_s: float) -> dict:
    return {
        "config": config,
        "seed": seed,
        "generator": generator,
        "code_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_clock_s": duration_s,
        "files": [
            {"name": f, "sha256": sha256_file(outputs.root / f),
             "bytes": (outputs.root / f).stat().st_size}
            for f in sorted(outputs.files)
        ],
        "warnings": outputs.warnings,
    }
