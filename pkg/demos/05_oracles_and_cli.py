"""
Checking the estimators, and driving everything from the shell
==============================================================

Importance-sampling estimates of the intrinsic Bayes factor are compared
with exact enumeration on a small table, then the same analyses are run
through the ``ordbayes`` command-line tool.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from ordbayes import BinomialHyper, BinomialTable, McConfig
from ordbayes.binomial import bf_intrinsic_e0, bf_intrinsic_e0_exact

table = BinomialTable(np.array([3, 1, 0]), np.array([6, 5, 4]))
hyper = BinomialHyper.uniform(3)
training = np.array([3, 2, 2])

exact = bf_intrinsic_e0_exact(table, hyper, training)
for samples in (1_000, 10_000, 100_000):
    est = bf_intrinsic_e0(table, hyper, training, McConfig(samples, seed=5), method="mc")
    print(f"S = {samples:6d}: {est.value:.5f} +/- {est.mc_se:.5f}   (exact {exact:.5f})")

# The command-line tool reads CSV or JSON tables and writes json, csv or md.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "h34.json"
    path.write_text(json.dumps({"kind": "multinomial", "counts": [[20, 0], [18, 5]]}))

    def run(*args):
        out = subprocess.run([sys.executable, "-m", "ordbayes.cli", *args], capture_output=True, text=True)
        print("$ ordbayes", " ".join(args), f"  [exit {out.returncode}]")
        print(out.stdout or out.stderr)

    run("analyze", "--table", str(path), "--constraint", "cond(1,1)<cond(2,1)",
        "--q", "0,0.5", "--samples", "20000", "--out", "md")
    run("oracle", "--table", str(path), "--t", "4")
    # A non-strict constraint is an input error and exits with status 2.
    run("analyze", "--table", str(path), "--constraint", "cond(1,1)<=cond(2,1)")
