"""Load learning CSVs and render the two canonical figure layouts.

``fig2``: normalized parameter distance (log scale) stacked above the
model error probability, one curve per input file.  ``fig4``: the
scaled average work and free-energy change per iteration.  Quantum
agents draw solid, classical agents dashed; the agent kind and
temperature label are recovered from the file name convention
``learn_<kind>_mu_<mu>.csv``.

Rendering is a pure function of the CSV bytes and the spec: same
inputs, same image.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LEARNING_CSV_HEADER = ("iter,gamma,delta,gamma_norm,delta_norm,dist_norm,"
                       "x_bar,p_e_model,overlap,w_avg_scaled,df_scaled,q_scaled")

_NAME_RE = re.compile(r"learn_(quantum|classical)_mu_(.+)$")


class FigureInputError(ValueError):
    """An input CSV is missing, malformed, or empty."""


@dataclass(frozen=True)
class CurveStyle:
    kind: str
    label: str
    linestyle: str


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[Path, ...]
    kind: str  # "fig2" | "fig4"
    output: Path
    dpi: int = 150
    style: dict = field(default_factory=lambda: {"quantum": "-", "classical": "--"})

    def __post_init__(self) -> None:
        if self.kind not in ("fig2", "fig4"):
            raise FigureInputError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise FigureInputError("no input CSV files given")


def _style_for(path: Path, styles: dict) -> CurveStyle:
    match = _NAME_RE.match(path.stem)
    if match:
        kind, mu = match.group(1), match.group(2).replace("p", ".")
        return CurveStyle(kind, f"{kind}, mu={mu}", styles.get(kind, "-"))
    return CurveStyle("unknown", path.stem, "-")


def load_learning_csv(path: Path) -> dict[str, list[float]]:
    """Read one learning CSV, enforcing the exact header and nonempty body."""
    path = Path(path)
    if not path.is_file():
        raise FigureInputError(f"input CSV not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureInputError(f"{path}: file is empty") from None
        if ",".join(header) != LEARNING_CSV_HEADER:
            raise FigureInputError(
                f"{path}: header does not match the learning CSV format")
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise FigureInputError(f"{path}: ragged row {row!r}")
            for name, cell in zip(header, row):
                try:
                    columns[name].append(float(cell))
                except ValueError:
                    raise FigureInputError(f"{path}: non-numeric cell {cell!r}") from None
    if not columns["iter"]:
        raise FigureInputError(f"{path}: no data rows")
    return columns


def render(spec: FigureSpec) -> Path:
    """Render the figure; raises before touching the output on bad input."""
    loaded = [(path, load_learning_csv(path), _style_for(path, spec.style))
              for path in spec.inputs]

    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7.0, 7.8), sharex=True)
    if spec.kind == "fig2":
        for _, cols, style in loaded:
            top.semilogy(cols["iter"], cols["dist_norm"], style.linestyle,
                         label=style.label)
            bottom.plot(cols["iter"], cols["p_e_model"], style.linestyle,
                        label=style.label)
        top.set_ylabel("normalized parameter distance")
        bottom.set_ylabel("error probability")
    else:
        for _, cols, style in loaded:
            top.plot(cols["iter"], cols["w_avg_scaled"], style.linestyle,
                     label=style.label)
            bottom.plot(cols["iter"], cols["df_scaled"], style.linestyle,
                        label=style.label)
        top.set_ylabel("scaled average work")
        bottom.set_ylabel("scaled free-energy change")
    bottom.set_xlabel("iteration")
    top.legend(fontsize=8, ncol=2)
    top.grid(True, alpha=0.3)
    bottom.grid(True, alpha=0.3)
    fig.tight_layout()

    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.dpi)
    plt.close(fig)
    return out
