"""Result emission: delimited trajectories, JSON reports, and SVG figures.

Figures are rendered with matplotlib to SVG files next to the CSV output;
the hash salt and stripped date metadata keep renders bit-identical for
identical inputs.
"""

from __future__ import annotations

import json

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "mixfront"

TRAJECTORY_COLUMNS = ("t", "g", "h", "gprime", "hprime",
                      "max_u", "max_v", "vx_left", "vx_right")


def _fmt(x):
    return format(float(x), ".17g")


def write_trajectory_csv(traj, path):
    cols = [traj.times, traj.g, traj.h, traj.gprime, traj.hprime,
            traj.max_u, traj.max_v, traj.vx_left, traj.vx_right]
    with open(path, "w") as fh:
        fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_fields_jsonl(traj, path):
    with open(path, "w") as fh:
        for state in traj.states:
            rec = {
                "t": state.t, "g": state.g, "h": state.h,
                "u": [float(v) for v in state.u],
                "v": [float(v) for v in state.v],
            }
            fh.write(json.dumps(rec) + "\n")


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def fronts_figure(traj, path, cap=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(traj.times, traj.h, label="h(t)")
    ax.plot(traj.times, traj.g, label="g(t)")
    if cap is not None:
        caps = cap(traj.times)
        ax.plot(traj.times, caps, "k--", lw=0.8, label="cap")
        ax.plot(traj.times, -caps, "k--", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def fields_figure(traj, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    floor = 1e-300
    ax.semilogy(traj.times, np.maximum(traj.max_u, floor), label="max u")
    ax.semilogy(traj.times, np.maximum(traj.max_v, floor), label="max v")
    ax.set_xlabel("t")
    ax.set_ylabel("field maximum")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def write_eigen_csv(rows, path):
    with open(path, "w") as fh:
        fh.write("operator,length,lambda1\n")
        for op, length, lam in rows:
            fh.write(f"{op},{_fmt(length)},{_fmt(lam)}\n")


def eigen_figure(rows, path, thresholds=None):
    fig, ax = plt.subplots(figsize=(6, 4))
    for op in ("nonlocal", "mixed"):
        pts = [(length, lam) for o, length, lam in rows if o == op]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", ms=3, label=op)
    ax.axhline(0.0, color="k", lw=0.6)
    if thresholds is not None:
        ax.axvline(thresholds.h_star, color="tab:orange", ls=":", lw=0.8)
        if thresholds.l_star is not None:
            ax.axvline(thresholds.l_star, color="tab:blue", ls=":", lw=0.8)
    ax.set_xscale("log")
    ax.set_xlabel("interval length")
    ax.set_ylabel("principal eigenvalue")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, path)


def write_sweep_csv(result, path):
    with open(path, "w") as fh:
        fh.write("scale,verdict,terminal_extent,terminal_field_max\n")
        for row in result.rows:
            fh.write(f"{_fmt(row.scale)},{row.verdict},"
                     f"{_fmt(row.terminal_extent)},{_fmt(row.terminal_field_max)}\n")


def sweep_figure(result, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = {"Spreading": "tab:green", "Vanishing": "tab:red",
              "Undetermined": "tab:gray"}
    for row in result.rows:
        ax.plot([row.scale], [row.terminal_extent], "o",
                color=colors.get(row.verdict, "k"))
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("response scale")
    ax.set_ylabel("terminal habitat width")
    handles = [plt.Line2D([], [], marker="o", ls="", color=c, label=v)
               for v, c in colors.items()]
    ax.legend(handles=handles, loc="best")
    fig.tight_layout()
    _save(fig, path)
