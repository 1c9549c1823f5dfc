"""Figure rendering for report outputs (written to files, never shown)."""

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def save_trace_figure(model, steps, path, grid=None):
    """Trajectory-and-belief figure for a simulated trace.

    Without a grid shape: a time-by-state belief heatmap with the true
    state overlaid.  With ``grid=(i_max, j_max)``: a panel of belief
    snapshots with the true position marked, one panel per sampled time.
    """
    if grid is not None:
        i_max, j_max = grid
        picks = np.unique(np.linspace(0, len(steps) - 1, min(8, len(steps)),
                                      dtype=int))
        fig, axes = plt.subplots(2, (len(picks) + 1) // 2,
                                 figsize=(2.4 * ((len(picks) + 1) // 2), 5.0),
                                 squeeze=False)
        for ax, ti in zip(axes.ravel(), picks):
            s = steps[ti]
            ax.imshow(s.belief.reshape(i_max, j_max), cmap="Blues",
                      vmin=0.0, origin="lower")
            xi, xj = divmod(s.x, j_max)
            ax.plot(xj, xi, "ks", markersize=4)
            ax.set_title(f"t={s.t}", fontsize=8)
            ax.set_xticks([])
            ax.set_yticks([])
        for ax in axes.ravel()[len(picks):]:
            ax.axis("off")
    else:
        bel = np.stack([s.belief for s in steps])
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.imshow(bel.T, aspect="auto", origin="lower", cmap="Blues",
                  extent=(steps[0].t, steps[-1].t, -0.5, model.n_states - 0.5))
        ax.plot([s.t for s in steps], [s.x for s in steps], "k.-",
                markersize=3, linewidth=0.7, label="state")
        reports = [s for s in steps if s.paged or s.registered]
        ax.plot([s.t for s in reports], [s.x for s in reports], "r^",
                markersize=5, label="report")
        ax.set_xlabel("t")
        ax.set_ylabel("state")
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_cost_figure(report, path):
    """Bar chart of the exact cost per report state."""
    fig, ax = plt.subplots(figsize=(6, 3.2))
    n = len(report.per_report_state)
    ax.bar(np.arange(n), report.per_report_state, color="steelblue")
    ax.set_xlabel("report state")
    ax.set_ylabel("discounted cost-to-go")
    ax.set_title(f"total from x0: {report.total:.6g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_walk_value_figure(model, result, path):
    """Displacement value profile with the registration thresholds marked."""
    n = model.n_states
    disp = np.arange(n) - model.x0
    fig, ax = plt.subplots(figsize=(6, 3.4))
    ax.plot(disp, result.V, "o-", markersize=3, color="steelblue",
            label="V(displacement)")
    level = model.reg_cost + result.V[model.x0]
    ax.axhline(level, color="gray", linestyle=":", linewidth=1,
               label="register level")
    for d, lab in ((result.d_r, "d_r"), (-result.d_l if result.d_l else None,
                                         "-d_l")):
        if d is not None:
            ax.axvline(d, color="firebrick", linestyle="--", linewidth=1)
            ax.text(d, ax.get_ylim()[1], lab, ha="center", va="bottom",
                    fontsize=8, color="firebrick")
    ax.set_xlabel("displacement from last report")
    ax.set_ylabel("cost-to-go")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_iteration_figure(log, path):
    """Cost after each half-step of the alternating optimization."""
    costs = log.cost_sequence()
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    ax.plot(np.arange(1, len(costs) + 1) / 2.0, costs, "o-",
            color="steelblue")
    ax.set_xlabel("round")
    ax.set_ylabel("discounted cost")
    ax.set_title("alternating optimization progress")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
