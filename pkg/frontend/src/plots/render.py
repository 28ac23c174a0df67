"""Figure rendering from circren CSV artifacts.

Every figure is a pure function of the CSV content plus the spec; no
mathematics is recomputed here — rates, counts and margins are read off
the files the experiments wrote.  Column layouts are validated against
the declared schemas and mismatches fail loudly rather than being
reinterpreted.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SCHEMAS = {
    "convergence": ["n", "distance"],
    "spectrum": ["re", "im", "modulus", "index", "degree"],
    "partition": ["index", "lo", "hi", "label"],
    "collision": ["delta", "unstable_count", "angle"],
}

KINDS = tuple(SCHEMAS)

UNSTABLE_MARGIN = 0.05


class SchemaError(Exception):
    """CSV header or cell contents do not match the declared schema."""


@dataclass
class FigureSpec:
    kind: str
    csv_path: Path
    out_path: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise SchemaError("unknown figure kind %r (have %s)"
                              % (self.kind, ", ".join(SCHEMAS)))
        self.csv_path = Path(self.csv_path)
        self.out_path = Path(self.out_path)


def read_table(path, kind):
    """Rows of the CSV as dicts, with the header checked exactly."""
    want = SCHEMAS[kind]
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError("%s: empty file" % path)
            if header != want:
                raise SchemaError("%s: header %r, schema for %r needs %r"
                                  % (path, header, kind, want))
            rows = []
            for k, cells in enumerate(reader):
                if len(cells) != len(want):
                    raise SchemaError("%s row %d: %d cells, need %d"
                                      % (path, k + 1, len(cells), len(want)))
                rows.append(dict(zip(want, cells)))
    except OSError as exc:
        raise SchemaError("cannot read %s: %s" % (path, exc))
    return rows


def _floats(rows, col, path):
    try:
        return [float(r[col]) for r in rows]
    except ValueError as exc:
        raise SchemaError("%s column %r: %s" % (path, col, exc))


def _render_convergence(rows, spec, ax):
    ns = _floats(rows, "n", spec.csv_path)
    ds = _floats(rows, "distance", spec.csv_path)
    ax.semilogy(ns, ds, "o-", color="tab:blue")
    # annotate the per-step rate between the last two resolvable levels
    pos = [(n, d) for n, d in zip(ns, ds) if d > 0]
    if len(pos) >= 2:
        (n0, d0), (n1, d1) = pos[-2], pos[-1]
        if n1 > n0:
            rate = (d1 / d0) ** (1.0 / (n1 - n0))
            ax.annotate("last-step rate %.3f" % rate, xy=(n1, d1),
                        xytext=(-80, 10), textcoords="offset points")
    ax.set_xlabel("renormalization level n")
    ax.set_ylabel("pair distance")
    ax.set_title("convergence of same-signature renormalizations")
    ax.grid(True, which="both", alpha=0.3)


def _render_spectrum(rows, spec, ax):
    re = _floats(rows, "re", spec.csv_path)
    im = _floats(rows, "im", spec.csv_path)
    mod = _floats(rows, "modulus", spec.csv_path)
    theta = [k * 2 * math.pi / 256 for k in range(257)]
    ax.plot([math.cos(t) for t in theta], [math.sin(t) for t in theta],
            "-", color="gray", lw=1)
    for r in (1.0 - UNSTABLE_MARGIN, 1.0 + UNSTABLE_MARGIN):
        ax.plot([r * math.cos(t) for t in theta],
                [r * math.sin(t) for t in theta],
                "--", color="gray", lw=0.6)
    stable = [(x, y) for x, y, m in zip(re, im, mod)
              if m <= 1.0 + UNSTABLE_MARGIN]
    unstable = [(x, y) for x, y, m in zip(re, im, mod)
                if m > 1.0 + UNSTABLE_MARGIN]
    if stable:
        ax.scatter(*zip(*stable), s=12, color="tab:blue", label="stable")
    sc = ax.scatter(*zip(*unstable) if unstable else ([], []),
                    s=40, marker="x", color="tab:red", label="unstable")
    sc.set_gid("unstable-markers")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("linearization spectrum (%d unstable)" % len(unstable))
    ax.legend(loc="upper left", fontsize=8)


def _render_partition(rows, spec, ax):
    colors = {"I_n": "tab:blue", "I_n+1": "tab:orange"}
    seen = set()
    for r in rows:
        lo = float(r["lo"])
        hi = float(r["hi"])
        label = r["label"]
        kw = {}
        if label not in seen:
            kw["label"] = label
            seen.add(label)
        ax.barh(0, hi - lo, left=lo, height=0.5,
                color=colors.get(label, "tab:gray"),
                edgecolor="black", lw=0.4, **kw)
    ax.set_xlim(0, 1)
    ax.set_yticks([])
    ax.set_xlabel("circle coordinate")
    ax.set_title("dynamical partition (%d cells)" % len(rows))
    ax.legend(loc="upper right", fontsize=8)


def _render_collision(rows, spec, ax):
    deltas = _floats(rows, "delta", spec.csv_path)
    angles = _floats(rows, "angle", spec.csv_path)
    counts = [int(float(r["unstable_count"])) for r in rows]
    good = [(d, a) for d, a, c in zip(deltas, angles, counts)
            if not math.isnan(a)]
    if good:
        ax.plot(*zip(*good), "o-", color="tab:blue")
    bad = [d for d, a in zip(deltas, angles) if math.isnan(a)]
    for d in bad:
        ax.axvline(d, color="tab:red", ls=":", lw=1)
    ax.set_xlabel("delta")
    ax.set_ylabel("angle between leading eigendirections (rad)")
    ax.set_title("unstable-direction angle vs delta")
    ax.grid(True, alpha=0.3)


_RENDERERS = {
    "convergence": _render_convergence,
    "spectrum": _render_spectrum,
    "partition": _render_partition,
    "collision": _render_collision,
}


def render(spec: FigureSpec) -> Path:
    """Write the figure for `spec` and return its output path."""
    rows = read_table(spec.csv_path, spec.kind)
    fig, ax = plt.subplots(figsize=spec.style.get("figsize", (6, 4.5)))
    try:
        _RENDERERS[spec.kind](rows, spec, ax)
        fig.tight_layout()
        spec.out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.out_path, format=spec.style.get("format", "svg"))
    finally:
        plt.close(fig)
    return spec.out_path
