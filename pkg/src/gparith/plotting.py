"""Render a traced curve to an image file next to its CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweep import TraceCurve

__all__ = ["render_trace_figure"]


def render_trace_figure(
    curve: TraceCurve, path, hyperbola_reference: float | None = None
) -> None:
    """Save a two-panel figure of the curve.

    Top panel: the three refined means against the sweep value, with
    non-converged samples marked.  Bottom panel: the refined second mean,
    optionally with the ordinary hyperbola ``reference / sweep`` dashed for
    comparison (pass the base third mean for multiplicative sweeps).
    """
    sweeps = np.array([s.sweep_value for s in curve.samples])
    means = np.array([s.refined.means for s in curve.samples])
    converged = np.array(
        [s.refined.diagnostics.converged for s in curve.samples], dtype=bool
    )

    fig, (ax_means, ax_second) = plt.subplots(
        2, 1, figsize=(7.0, 7.5), sharex=True
    )
    for index, label in enumerate(
        ("refined mean 1", "refined mean 2", "refined mean 3")
    ):
        ax_means.plot(sweeps, means[:, index], lw=1.2, label=label)
    if (~converged).any():
        ax_means.plot(
            sweeps[~converged],
            means[~converged, 1],
            "rx",
            ms=5,
            label="not converged",
        )
    ax_means.set_ylabel("refined means")
    ax_means.grid(alpha=0.3)
    ax_means.legend(loc="best", fontsize=9)

    ax_second.plot(sweeps, means[:, 1], color="tab:red", lw=1.4, label="refined mean 2")
    if hyperbola_reference is not None:
        mask = np.abs(sweeps) > 1e-9
        with np.errstate(divide="ignore"):
            reference = hyperbola_reference / sweeps[mask]
        ax_second.plot(
            sweeps[mask], reference, "k--", lw=0.9, label="reference c / sweep"
        )
        span = means[:, 1].max() - means[:, 1].min()
        pad = 0.1 * span if span > 0 else 1.0
        ax_second.set_ylim(means[:, 1].min() - pad, means[:, 1].max() + pad)
    ax_second.set_xlabel("swept prior mean")
    ax_second.set_ylabel("refined mean 2")
    ax_second.grid(alpha=0.3)
    ax_second.legend(loc="best", fontsize=9)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
