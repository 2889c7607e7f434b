"""SVG plots, written as plain markup.

- plots/<dataset>-<setting>.svg - learning curves, one per dataset and setting. Left
  panel loss, right panel accuracy; validation solid, training dashed; the shaded band
  is mean ± one standard deviation over seeds.
- plots/all-<setting>.svg - the same curves averaged over datasets, when a setting has
  more than one. Each seed's curves are averaged first, the band spreads over seeds.
- plots/compare.svg - the classical comparison, circuits against the mlp, when the
  directory holds mlp runs.
- plots/remap-functions.svg - the re-mapping functions over [-2π, 2π].
"""
from collections import defaultdict
from html import escape
from operator import attrgetter
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .config import MLP, MLP_DATASET
from .embedding import AMPLITUDE
from .exceptions import ConfigurationError
from .remap import REMAP_NAMES, get_remap, remap
from .report import ALL_DATASETS, by_setting, label, top_approaches
from .runner import read_records
from .training import TrainRecord

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)
PANEL_WIDTH = 420
PANEL_HEIGHT = 300
MARGIN = 50
LEGEND_WIDTH = 130

Point = Tuple[float, float]
CURVE_FIELDS = ("train_loss", "train_acc", "valid_loss", "valid_acc")


class SVG:
    def __init__(self) -> None:
        self.svg = ""

    def header(self, width: int, height: int) -> None:
        self.svg += (
            '<?xml version="1.0" standalone="no"?>\n'
            f'<svg version="1.1" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" xmlns="http://www.w3.org/2000/svg">\n'
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
        )

    def group_start(self, attr: Dict[str, str]) -> None:
        g_attr = [
            f'{key}="{escape(value)}"'
            for key, value in attr.items()
            if key in ("id", "class")
        ]
        self.svg += f'<g {" ".join(g_attr)}>\n'
        if "title" in attr:
            self.svg += f"<title>{escape(attr['title'])}</title>\n"

    def group_end(self) -> None:
        self.svg += "</g>\n"

    def line(
        self, p1: Point, p2: Point, stroke: str = "black", extra: str = ""
    ) -> None:
        self.svg += (
            f'<line x1="{p1[0]:.1f}" y1="{p1[1]:.1f}" x2="{p2[0]:.1f}" '
            f'y2="{p2[1]:.1f}" stroke="{stroke}" {extra}/>\n'
        )

    def polyline(self, points: Sequence[Point], stroke: str, extra: str = "") -> None:
        coordinates = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.svg += (
            f'<polyline points="{coordinates}" fill="none" stroke="{stroke}" '
            f'stroke-width="1.5" {extra}/>\n'
        )

    def polygon(self, points: Sequence[Point], fill: str, extra: str = "") -> None:
        coordinates = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.svg += f'<polygon points="{coordinates}" fill="{fill}" {extra}/>\n'

    def text(self, x: float, y: float, string: str, extra: str = "") -> None:
        self.svg += (
            f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" '
            f'font-size="11" {extra}>{escape(string)}</text>\n'
        )

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"


class Axes:
    """Maps data coordinates into a panel whose top-left corner is (left, top)."""

    def __init__(
        self, left: float, top: float, x_range: Point, y_range: Point
    ) -> None:
        self.left, self.top = left, top
        self.x_range = x_range
        low, high = y_range
        self.y_range = (low - 0.5, high + 0.5) if high == low else y_range

    def point(self, x: float, y: float) -> Point:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        width, height = PANEL_WIDTH - 2 * MARGIN, PANEL_HEIGHT - 2 * MARGIN
        return (
            self.left + MARGIN + (x - x0) / ((x1 - x0) or 1) * width,
            self.top + PANEL_HEIGHT - MARGIN - (y - y0) / (y1 - y0) * height,
        )

    def draw_frame(self, svg: SVG, title: str, x_label: str) -> None:
        (x0, x1), (y0, y1) = self.x_range, self.y_range
        origin = self.point(x0, y0)
        svg.line(origin, self.point(x1, y0))
        svg.line(origin, self.point(x0, y1))
        for fraction in (0.0, 0.5, 1.0):
            y = y0 + fraction * (y1 - y0)
            px, py = self.point(x0, y)
            svg.text(px - 6, py + 4, f"{y:.2f}", 'text-anchor="end"')
            x = x0 + fraction * (x1 - x0)
            px, py = self.point(x, y0)
            svg.text(px, py + 16, f"{x:.3g}", 'text-anchor="middle"')
        svg.text(
            self.left + PANEL_WIDTH / 2,
            self.top + MARGIN / 2,
            title,
            'text-anchor="middle" font-weight="bold"',
        )
        svg.text(
            self.left + PANEL_WIDTH / 2,
            self.top + PANEL_HEIGHT - MARGIN / 4,
            x_label,
            'text-anchor="middle"',
        )


def curve_statistics(
    curves: Sequence[Sequence[float]],
) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(curves, dtype=float)
    return values.mean(axis=0), values.std(axis=0)


def _draw_curve(
    svg: SVG, axes: Axes, curves: Sequence[Sequence[float]], colour: str, dashed: bool
) -> None:
    mean, std = curve_statistics(curves)
    epochs = np.arange(1, len(mean) + 1)
    if len(curves) > 1:
        upper = [axes.point(x, y) for x, y in zip(epochs, mean + std)]
        lower = [axes.point(x, y) for x, y in zip(epochs[::-1], (mean - std)[::-1])]
        svg.polygon(upper + lower, colour, 'fill-opacity="0.15" class="band"')
    svg.polyline(
        [axes.point(x, y) for x, y in zip(epochs, mean)],
        colour,
        'stroke-dasharray="5,3"' if dashed else "",
    )


def _range(records: Sequence[TrainRecord], fields: Sequence[str]) -> Point:
    curves = [np.asarray(getattr(r, f)) for r in records for f in fields]
    return float(min(c.min() for c in curves)), float(max(c.max() for c in curves))


def learning_curves_svg(
    records: Sequence[TrainRecord],
    title: str,
    approaches: Sequence[str],
    key: Callable[[TrainRecord], str] = attrgetter("approach"),
) -> str:
    """Loss and accuracy panels, one colour per approach. `key` names a record's
    approach.
    """
    n_epochs = max(len(record.valid_loss) for record in records)
    width = 2 * PANEL_WIDTH + LEGEND_WIDTH
    svg = SVG()
    svg.header(width, PANEL_HEIGHT + MARGIN)
    svg.text(10, 18, title, 'font-size="13" font-weight="bold"')
    shown = [r for r in records if key(r) in approaches]
    for panel, (metric, fields) in enumerate(
        (
            ("loss", ("train_loss", "valid_loss")),
            ("accuracy", ("train_acc", "valid_acc")),
        )
    ):
        y_range = _range(shown, fields)
        axes = Axes(panel * PANEL_WIDTH, MARGIN / 2, (1, n_epochs), y_range)
        axes.draw_frame(svg, metric, "epoch")
        for index, approach in enumerate(approaches):
            colour = PALETTE[index % len(PALETTE)]
            runs = [r for r in shown if key(r) == approach]
            if not runs:
                continue
            svg.group_start({"class": "approach", "title": f"{approach} {metric}"})
            for field in fields:
                _draw_curve(
                    svg,
                    axes,
                    [getattr(r, field) for r in runs],
                    colour,
                    dashed=field.startswith("train"),
                )
            svg.group_end()
    for index, approach in enumerate(approaches):
        y = MARGIN + 18 * index
        colour = PALETTE[index % len(PALETTE)]
        svg.line((2 * PANEL_WIDTH + 10, y), (2 * PANEL_WIDTH + 30, y), colour)
        svg.text(2 * PANEL_WIDTH + 36, y + 4, approach)
    return svg.get_svg()


def average_over_datasets(records: Sequence[TrainRecord]) -> List[TrainRecord]:
    """One record per approach and seed, its curves the mean over datasets."""
    grouped: Dict[Tuple[str, int], List[TrainRecord]] = defaultdict(list)
    for record in records:
        grouped[(record.approach, record.seed)].append(record)
    averaged = []
    for runs in (grouped[group] for group in sorted(grouped)):
        n_epochs = min(len(r.valid_loss) for r in runs)
        curves = {
            field: np.mean(
                [getattr(r, field)[:n_epochs] for r in runs], axis=0
            ).tolist()
            for field in CURVE_FIELDS
        }
        averaged.append(
            runs[0]._replace(
                dataset=ALL_DATASETS,
                test_acc=float(np.mean([r.test_acc for r in runs])),
                test_correct=[value for r in runs for value in r.test_correct],
                max_abs_weight=max(r.max_abs_weight for r in runs),
                **curves,
            )
        )
    return averaged


def comparison_svg(records: Sequence[TrainRecord]) -> str:
    labels = sorted({label(record) for record in records})
    return learning_curves_svg(
        records, f"classical comparison ({MLP_DATASET})", labels, key=label
    )


def remap_functions_svg(names: Sequence[str] = REMAP_NAMES) -> str:
    theta = np.linspace(-2 * np.pi, 2 * np.pi, 401)
    curves = {name: remap(get_remap(name), theta) for name in names}
    low = min(float(curve.min()) for curve in curves.values())
    high = max(float(curve.max()) for curve in curves.values())
    svg = SVG()
    svg.header(PANEL_WIDTH + LEGEND_WIDTH, PANEL_HEIGHT)
    axes = Axes(0, 0, (theta[0], theta[-1]), (low, high))
    axes.draw_frame(svg, "re-mapping functions", "θ")
    for bound in (-np.pi, np.pi):
        svg.line(
            axes.point(theta[0], bound),
            axes.point(theta[-1], bound),
            "#999999",
            'stroke-dasharray="2,2"',
        )
    for index, name in enumerate(names):
        colour = PALETTE[index % len(PALETTE)]
        svg.polyline([axes.point(x, y) for x, y in zip(theta, curves[name])], colour)
        y = MARGIN + 18 * index
        svg.line((PANEL_WIDTH + 10, y), (PANEL_WIDTH + 30, y), colour)
        svg.text(PANEL_WIDTH + 36, y + 4, name)
    return svg.get_svg()


def plot_remap_functions(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(remap_functions_svg())
    return path


def plot(out: str, top: Optional[int] = None) -> List[Path]:
    """Write every learning-curve plot of a results directory, and the re-mapping
    functions. `top` keeps the baseline and the top-N approaches by mean convergence
    difference.

    Raises:
        ConfigurationError: There are no finished runs in `out`.
    """
    records = read_records(out)
    if not records:
        raise ConfigurationError(f"No finished runs in {out}")
    directory = Path(out) / "plots"
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, group in by_setting(records.values()).items():
        per_dataset: Dict[str, List[TrainRecord]] = defaultdict(list)
        for record in group:
            per_dataset[record.dataset].append(record)
        for dataset, runs in sorted(per_dataset.items()):
            approaches = top_approaches(runs, top)
            path = directory / f"{dataset}-{name}.svg"
            path.write_text(
                learning_curves_svg(runs, f"{dataset} ({name})", approaches)
            )
            written.append(path)
        if len(per_dataset) > 1:
            averaged = average_over_datasets(group)
            path = directory / f"{ALL_DATASETS}-{name}.svg"
            title = f"mean over {len(per_dataset)} datasets ({name})"
            path.write_text(
                learning_curves_svg(averaged, title, top_approaches(averaged, top))
            )
            written.append(path)
    comparison = [
        record
        for record in records.values()
        if record.dataset == MLP_DATASET and record.embedding == AMPLITUDE
    ]
    if any(record.model == MLP for record in comparison):
        path = directory / "compare.svg"
        path.write_text(comparison_svg(comparison))
        written.append(path)
    written.append(plot_remap_functions(directory / "remap-functions.svg"))
    logging.info("Wrote %d plots to %s", len(written), directory)
    return written
