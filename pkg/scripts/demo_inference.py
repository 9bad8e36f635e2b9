#!/usr/bin/env python3
"""End-to-end walkthrough on the two bundled requirement examples.

Builds both layers, corrects small batches, shows traces and gradients, and
round-trips everything through the CLI file formats in a temp directory.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from shield import build_shield_layer

TRAFFIC = """\
not y_0 or y_1 or y_2 or y_3
not y_0 or not y_1 or not y_2
not y_0 or not y_1 or not y_3
not y_0 or not y_2 or not y_3
"""

CLINICAL = """\
y_0 - y_1 >= 0
y_2 - y_3 >= 0
"""


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="shield-demo-"))
    traffic_path = workdir / "traffic.cnf"
    traffic_path.write_text(TRAFFIC)
    clinical_path = workdir / "clinical.lin"
    clinical_path.write_text(CLINICAL)

    print("== multi-label: traffic light and its colors ==")
    layer = build_shield_layer(4, traffic_path)
    print(f"engine: {layer.engine}")
    batch = np.array([
        [0.9, 0.4, 0.3, 0.2],   # light on but every color off: must repair
        [0.9, 0.8, 0.1, 0.2],   # compliant: untouched
        [0.2, 0.6, 0.6, 0.1],   # light off: colors may stay as they are
    ])
    corrected = layer(batch)
    for before, after in zip(batch, corrected):
        marker = "corrected" if not np.array_equal(before, after) else "unchanged"
        print(f"  {before} -> {after}  [{marker}]")

    print("\n== gradients through the repair ==")
    cv, trace = layer.apply_with_trace([0.9, 0.4, 0.3, 0.2])
    print(f"branches: {trace.branches}")
    cot = layer.vjp(trace, [0.0, 1.0, 0.0, 0.0])
    print(f"cotangent e_1 pulled back: {cot}")

    print("\n== tabular generation: max >= min pairs ==")
    clinical = build_shield_layer(4, clinical_path)
    row = [10.0, 12.0, 38.0, 37.0]
    print(f"  {row} -> {clinical.correct_row(row)}")

    print("\n== same thing through the CLI ==")
    preds = workdir / "preds.csv"
    preds.write_text("10,12,38,37\n")
    out = workdir / "out.csv"
    report = workdir / "report.json"
    cmd = [
        sys.executable, "-m", "shield", "apply",
        "-r", str(clinical_path), "-i", str(preds),
        "-o", str(out), "--report", str(report),
    ]
    subprocess.run(cmd, check=True)
    print(f"  corrected csv: {out.read_text().strip()}")
    print(f"  report written to {report}")


if __name__ == "__main__":
    main()
