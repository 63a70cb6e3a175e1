# File: dsqi_bench/writers/plot_writer.py
"""Vector-graphics plots of processed decision streams"""

import logging
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from core.exceptions import ConfigurationError  # noqa: E402
from models.stream_model import DecisionStream, ProcessedStream  # noqa: E402
from models.timeline import GroundTruthTimeline  # noqa: E402
from writers.csv_writer import ensure_parent  # noqa: E402

logger = logging.getLogger(__name__)


def plot_decision_stream(
    path: str,
    stream: DecisionStream,
    processed: ProcessedStream,
    timeline: Optional[GroundTruthTimeline] = None,
    title: str = "",
) -> None:
    """Render a decision stream to SVG

    Each frame is one marker at its max confidence, coloured by the
    processed decision; rejected frames get a black ring; ground-truth
    steady segments are shaded in their class colour.
    """
    plt.rcParams["svg.hashsalt"] = "dsqi"
    colours = plt.get_cmap("tab10")
    times = stream.ts_ms / 1000.0
    period = stream.increment_ms / 1000.0
    fig, ax = plt.subplots(figsize=(12, 3.5))
    try:
        if timeline is not None:
            for seg in timeline.steady_segments():
                ax.axvspan(seg.start_frame * period, seg.end_frame * period,
                           color=colours((seg.class_id - 1) % 10), alpha=0.15, linewidth=0)
        ax.scatter(times, stream.max_confidence, s=8,
                   c=[colours((d - 1) % 10) for d in processed.decisions], linewidths=0)
        rejected = processed.rejected
        if np.any(rejected):
            ax.scatter(times[rejected], stream.max_confidence[rejected], s=30,
                       facecolors="none", edgecolors="black", linewidths=0.6)
        for k in range(1, stream.n_classes + 1):
            ax.scatter([], [], s=8, color=colours((k - 1) % 10), label=f"class {k}")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("max confidence")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(title)
        ax.legend(loc="lower right", ncol=min(stream.n_classes, 7), fontsize="small")
        target = ensure_parent(path)
        try:
            fig.savefig(target, format="svg", bbox_inches="tight", metadata={"Date": None})
        except OSError as e:
            raise ConfigurationError(f"cannot write {target}: {e.strerror}") from e
    finally:
        plt.close(fig)
    logger.info("Wrote plot %s", path)
