"""Regenerate the default bound, rate and optimal-intensity curves.

Usage: python3 scripts/make_figures.py [OUTDIR] [--jobs N]

Writes sweep.csv and optimize.csv plus their SVG plots into OUTDIR
(default: figures/). The optimisation uses a 2 dB loss grid to stay quick.
"""

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from mdidecoy import cli


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args(argv)
    out = Path(args.outdir)

    code = cli.main(["sweep", "--out", str(out), "--plot", "--jobs", str(args.jobs)])
    if code:
        return code
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "optimize.json"
        cfg.write_text(json.dumps({"loss_step": 2.0}))
        code = cli.main(["optimize", "--config", str(cfg), "--out", str(out), "--plot",
                         "--jobs", str(args.jobs)])
    if code == 0:
        print(f"figures written to {out}/")
    return code


if __name__ == "__main__":
    sys.exit(main())
