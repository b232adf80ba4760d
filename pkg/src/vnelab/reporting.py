"""Report assembly, serialization (JSON/CSV), and figure rendering."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

__all__ = ["format_number", "emit_report", "render_figures"]


def format_number(x):
    """Round floats to 12 significant digits for stable report output."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [format_number(x.real), format_number(x.imag)]
    if isinstance(x, dict):
        return {k: format_number(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [format_number(v) for v in x]
    return x


def _atomic_write(path, data):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".vnelab-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _flatten_scalars(prefix, value, rows):
    if isinstance(value, bool):
        rows.append((prefix, "", "", "yes" if value else "no"))
    elif isinstance(value, (int, float)):
        rows.append((prefix, f"{float(value):.12g}", "", ""))
    elif isinstance(value, dict):
        for k, v in value.items():
            _flatten_scalars(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(value, (list, tuple)):
        # matrices and vectors are omitted from the flat CSV view
        if value and all(isinstance(v, bool) for v in value):
            for i, v in enumerate(value):
                _flatten_scalars(f"{prefix}[{i}]", v, rows)


def emit_report(report, fmt="json", out=None):
    """Serialize a report; JSON keeps canonical key order, CSV flattens scalars.

    Returns the serialized text; writes atomically when `out` is given.
    """
    report = format_number(report)
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["task", "quantity", "value", "threshold", "pass"])
        for task in report.get("tasks", []):
            rows = []
            for key, value in task.items():
                if key in ("name", "type"):
                    continue
                _flatten_scalars(key, value, rows)
            for quantity, value, threshold, passed in rows:
                writer.writerow([task["name"], quantity, value, threshold, passed])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown report format: {fmt!r}")
    if out is not None:
        try:
            _atomic_write(out, text)
        except OSError as exc:
            raise OSError(f"cannot write report to {out}: {exc}") from exc
    return text


def render_figures(report, directory):
    """Render kernel heatmaps and verification margin charts as PNG files.

    One figure per kernel/verify/koopman task, written next to the delimited
    output; returns the list of written paths.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    os.makedirs(directory, exist_ok=True)
    written = []
    for task in report.get("tasks", []):
        name = task["name"].replace("/", "_")
        path = os.path.join(directory, f"{name}.png")
        kind = task["type"]
        if kind == "kernel":
            K = np.array(task["kernel"])
            fig, ax = plt.subplots(figsize=(4.2, 3.6))
            im = ax.imshow(K, cmap="viridis", vmin=0.0)
            ax.set_xlabel("Lambda element")
            ax.set_ylabel("Gamma element")
            ax.set_title(f"induction kernel: {task.get('coupling', name)}", fontsize=9)
            fig.colorbar(im, ax=ax, shrink=0.85)
        elif kind == "verify":
            entries = [(k, v) for k, v in task.items()
                       if isinstance(v, (int, float)) and not isinstance(v, bool)]
            if not entries:
                continue
            labels, values = zip(*entries)
            fig, ax = plt.subplots(figsize=(6.0, 0.5 + 0.32 * len(labels)))
            y = np.arange(len(labels))
            ax.barh(y, values, color=["tab:green" if task.get("pass") else "tab:red"] * len(labels))
            ax.set_yticks(y)
            ax.set_yticklabels(labels, fontsize=7)
            ax.set_xscale("symlog", linthresh=1e-12)
            ax.set_title(f"verification quantities: {task.get('coupling', name)}", fontsize=9)
        elif kind == "koopman_check":
            traces = task.get("gamma_koopman_traces", [])
            fig, ax = plt.subplots(figsize=(4.8, 3.2))
            ax.bar(range(len(traces)), traces)
            ax.set_yscale("symlog", linthresh=1e-12)
            ax.set_xlabel("group element")
            ax.set_ylabel("|trace of Koopman unitary|")
            ax.set_title(name, fontsize=9)
        else:
            continue
        fig.tight_layout()
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written
