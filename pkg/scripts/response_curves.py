#!/usr/bin/env python3
"""Plot the family of adaptive response curves used to modulate contrast.

All curves pass through (1, 1); larger exponents answer low contrasts with
steeper gain and saturate earlier.  Writes response_curves.png.

Usage: python scripts/response_curves.py [output.png]
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ctcompand.core import CompandParams
from ctcompand.modulate import naka_rushton


def main() -> int:
    out = sys.argv[1] if len(sys.argv) > 1 else "response_curves.png"
    p = CompandParams()
    contrast = np.linspace(0.01, 3.0, 600).reshape(1, -1)
    fig, ax = plt.subplots(figsize=(6, 4))
    for gamma in (0.5, 1.0, 2.0, 4.0, 8.0):
        ax.plot(contrast[0], naka_rushton(contrast, gamma, p)[0], label=f"exponent {gamma:g}")
    ax.plot([1.0], [1.0], "ko", markersize=4)
    ax.axhline(1.0, color="gray", lw=0.5, ls=":")
    ax.axvline(1.0, color="gray", lw=0.5, ls=":")
    ax.set_xlabel("local contrast (ratio to surround)")
    ax.set_ylabel("modulated contrast")
    ax.set_title("Adaptive response family (all curves meet at (1, 1))")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
