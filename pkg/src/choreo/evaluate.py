"""Seven-way comparison: three searched dances against the four baselines.

Every approach is scored post-hoc under all three representations, so the
table shows how well e.g. an action-optimized dance aligns when judged by
state similarity. Random baselines report mean and spread over seeds.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .baselines import BaselineKind, generate_baseline
from .dance import REPRESENTATIONS, AgentConfig
from .features import BeatTimes, MusicMatrix, beats_to_steps
from .objective import alignment_score
from .search import SearchConfig, greedy_chunked_search

UNDEFINED = "undefined"


@dataclass(frozen=True)
class TableCell:
    """Mean score (None when undefined for every sample) and optional spread."""

    mean: float | None
    std: float | None = None

    def as_text(self) -> str:
        if self.mean is None:
            return UNDEFINED
        if self.std is None:
            return f"{self.mean:.4f}"
        return f"{self.mean:.4f}±{self.std:.4f}"


@dataclass(frozen=True)
class TableRow:
    approach: str
    cells: tuple[TableCell, ...]  # aligned with REPRESENTATIONS


@dataclass(frozen=True)
class ScoreTable:
    rows: tuple[TableRow, ...]


def score_table(
    music: MusicMatrix,
    beats: BeatTimes,
    agent: AgentConfig,
    seeds: list[int],
    chunk_size: int = 5,
) -> ScoreTable:
    """Run the searches and baselines on one song and collect their scores.

    The song duration is reconstructed from the matrix geometry (frame count
    times hop), which is within one hop of the true length.
    """
    duration = music.m * music.frame_hop_seconds
    beat_steps = beats_to_steps(beats, agent.n_steps, duration)

    rows = []
    for representation in REPRESENTATIONS:
        cfg = SearchConfig(agent=agent, representation=representation, chunk_size=chunk_size)
        seq, _ = greedy_chunked_search(music, cfg)
        cells = tuple(
            TableCell(mean=alignment_score(music, seq, rep).pearson)
            for rep in REPRESENTATIONS
        )
        rows.append(TableRow(approach=f"search-{representation.replace('_', '-')}", cells=cells))

    for kind in BaselineKind:
        if kind.random:
            samples = {rep: [] for rep in REPRESENTATIONS}
            for seed in seeds:
                seq = generate_baseline(kind, agent, beat_steps, seed=seed)
                for rep in REPRESENTATIONS:
                    samples[rep].append(alignment_score(music, seq, rep).pearson)
            cells = tuple(_aggregate(samples[rep]) for rep in REPRESENTATIONS)
        else:
            seq = generate_baseline(kind, agent, beat_steps)
            cells = tuple(
                TableCell(mean=alignment_score(music, seq, rep).pearson)
                for rep in REPRESENTATIONS
            )
        rows.append(TableRow(approach=kind.value, cells=cells))

    return ScoreTable(rows=tuple(rows))


def _aggregate(scores: list[float | None]) -> TableCell:
    defined = [s for s in scores if s is not None]
    if not defined:
        return TableCell(mean=None)
    values = np.asarray(defined, dtype=np.float64)
    return TableCell(mean=float(values.mean()), std=float(values.std()))


def to_csv(table: ScoreTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["approach"]
    for rep in REPRESENTATIONS:
        header += [rep, f"{rep}_std"]
    writer.writerow(header)
    for row in table.rows:
        record = [row.approach]
        for cell in row.cells:
            record.append(UNDEFINED if cell.mean is None else f"{cell.mean:.10f}")
            record.append("" if cell.std is None else f"{cell.std:.10f}")
        writer.writerow(record)
    return buffer.getvalue()


def format_text(table: ScoreTable) -> str:
    names = ["approach"] + [rep.replace("_", "+") for rep in REPRESENTATIONS]
    body = [[row.approach] + [cell.as_text() for cell in row.cells] for row in table.rows]
    widths = [max(len(line[i]) for line in [names] + body) for i in range(len(names))]
    lines = ["  ".join(name.ljust(w) for name, w in zip(names, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for line in body:
        lines.append("  ".join(field.ljust(w) for field, w in zip(line, widths)))
    return "\n".join(lines) + "\n"


def save_score_figure(table: ScoreTable, path) -> None:
    """Grouped bar chart of the table, one bar group per approach."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    approaches = [row.approach for row in table.rows]
    x = np.arange(len(approaches))
    group_width = 0.8
    bar_width = group_width / len(REPRESENTATIONS)

    fig, ax = plt.subplots(figsize=(9, 4.5))
    for j, rep in enumerate(REPRESENTATIONS):
        heights = [
            np.nan if row.cells[j].mean is None else row.cells[j].mean
            for row in table.rows
        ]
        errors = [row.cells[j].std or 0.0 for row in table.rows]
        offset = (j - (len(REPRESENTATIONS) - 1) / 2) * bar_width
        ax.bar(x + offset, heights, bar_width, yerr=errors, capsize=2,
               label=rep.replace("_", "+"))
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(x)
    ax.set_xticklabels(approaches, rotation=20, ha="right")
    ax.set_ylabel("alignment score (Pearson r)")
    ax.legend(title="scored as", fontsize=8)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
