#!/usr/bin/env python3
"""Sweep the stable-manifold graph of a saturating perturbation of
diag(0.5, 2) and print the resulting table.

Writes the problem/grid JSON files the CLI consumes, runs the sweep, and
leaves the CSV next to them for plotting.
"""

import argparse
import json
import pathlib
import sys

import numpy as np

from specseq.cli import main as cli_main


def build_inputs(workdir, eps, grid_vals):
    problem = {
        "A": {"dim": 2, "re": [[0.5, 0.0], [0.0, 2.0]], "im": [[0, 0], [0, 0]]},
        "F": {"kernel": "scaled_bounded_saturation", "params": {"eps": eps}},
        "fp_tol": 1e-12,
    }
    grid = {"vectors": [{"dim": 2, "re": [t, 0.0]} for t in grid_vals]}
    prob_path = workdir / "problem.json"
    grid_path = workdir / "grid.json"
    prob_path.write_text(json.dumps(problem, indent=2))
    grid_path.write_text(json.dumps(grid, indent=2))
    return prob_path, grid_path


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, default=0.01)
    parser.add_argument("--points", type=int, default=9)
    parser.add_argument("--radius", type=float, default=0.4)
    parser.add_argument("--workdir", default="manifold_demo_out")
    args = parser.parse_args(argv)

    workdir = pathlib.Path(args.workdir)
    workdir.mkdir(exist_ok=True)
    grid_vals = np.linspace(-args.radius, args.radius, args.points).tolist()
    prob_path, grid_path = build_inputs(workdir, args.eps, grid_vals)
    out_csv = workdir / "manifold.csv"
    code = cli_main(
        [
            "stable-manifold",
            "--problem",
            str(prob_path),
            "--grid",
            str(grid_path),
            "--out",
            str(out_csv),
        ]
    )
    if code != 0:
        return code
    print(out_csv.read_text())
    print(f"table written to {out_csv}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
