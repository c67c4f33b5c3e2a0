"""Tensor-product (x, t) grids of solution values and their CSV form.

CSV layout: ``# key=value`` metadata lines, a header ``x1,...,xn,t,u`` and
one row per grid point in t-major order (t outermost, then x1, x2, ...).
Values are written with 17 significant digits so a read reproduces them
bit for bit.
"""
from dataclasses import dataclass, field
import csv
import io

import numpy as np

from .errors import ConfigError, NumericalError


@dataclass(eq=False)
class GridField:
    """Values on ``t_axis x x_axes[0] x ... x x_axes[n-1]`` (row-major)."""

    x_axes: tuple
    t_axis: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x_axes = tuple(np.asarray(a, dtype=np.float64) for a in self.x_axes)
        self.t_axis = np.asarray(self.t_axis, dtype=np.float64)
        shape = (self.t_axis.size, *(a.size for a in self.x_axes))
        values = np.asarray(self.values, dtype=np.float64)
        if values.size != int(np.prod(shape)):
            raise ValueError(f"{values.size} values for a grid of shape {shape}")
        self.values = values.reshape(shape)
        bad = np.flatnonzero(~np.isfinite(self.values.ravel()))
        if bad.size:
            raise NumericalError(f"non-finite solution value at grid row {int(bad[0])}",
                                 index=int(bad[0]))

    @property
    def n(self):
        return len(self.x_axes)

    @property
    def shape(self):
        return self.values.shape

    def points(self):
        """``(x_batch, t_batch)`` for every grid point in t-major order."""
        mesh = np.meshgrid(self.t_axis, *self.x_axes, indexing="ij")
        t = mesh[0].ravel()
        x = np.stack([m.ravel() for m in mesh[1:]], axis=1)
        return x, t

    @classmethod
    def evaluate(cls, x_axes, t_axis, func, metadata=None):
        """Fill a grid from ``func(x_batch, t_batch)``."""
        empty = cls(x_axes, t_axis, np.zeros((len(t_axis), *(len(a) for a in x_axes))))
        x, t = empty.points()
        empty.values = np.asarray(func(x, t), dtype=np.float64).reshape(empty.shape)
        empty.__post_init__()
        empty.metadata = dict(metadata or {})
        return empty

    def reflected(self):
        """Even continuation to negative x and t (axes mirrored through 0)."""
        def mirror(axis):
            neg = -axis[::-1]
            keep = axis[::-1] != 0.0
            return np.concatenate([neg[keep], axis]), keep

        values = self.values
        axes = [self.t_axis, *self.x_axes]
        new_axes = []
        for dim, axis in enumerate(axes):
            full, keep = mirror(axis)
            flipped = np.flip(values, axis=dim).compress(keep, axis=dim)
            values = np.concatenate([flipped, values], axis=dim)
            new_axes.append(full)
        meta = dict(self.metadata, reflected="true")
        return GridField(tuple(new_axes[1:]), new_axes[0], values, meta)

    def to_csv(self):
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}={value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(self.n)] + ["t", "u"])
        x, t = self.points()
        u = self.values.ravel()
        for row in range(t.size):
            writer.writerow([f"{v:.17g}" for v in (*x[row], t[row], u[row])])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text):
        meta = {}
        lines = text.splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif line.strip():
                body.append(line)
        rows = list(csv.reader(body))
        header, data = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
        n = len(header) - 2
        if header[-2:] != ["t", "u"] or header[:n] != [f"x{i + 1}" for i in range(n)]:
            raise ConfigError("csv", f"unexpected header {header}")
        t_axis = _unique_in_order(data[:, n])
        x_axes = tuple(_unique_in_order(data[:, i]) for i in range(n))
        return cls(x_axes, t_axis, data[:, n + 1], meta)

    @classmethod
    def read_csv(cls, path):
        with open(path) as fh:
            return cls.from_csv(fh.read())


def _unique_in_order(column):
    _, first = np.unique(column, return_index=True)
    return column[np.sort(first)]
