"""Shannon-entropy estimator error on the vacuum density as the grid is refined."""
import argparse
import math

import numpy as np

from lctur.entropy import shannon_entropy
from lctur.grid import GridSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--extent", type=float, nargs="+", default=[4.0, 6.0, 12.0], help="grid half-widths")
    ap.add_argument("--points", type=int, nargs="+", default=[8, 16, 32, 64, 128, 256, 512])
    args = ap.parse_args(argv)

    exact = 0.5 * math.log(math.pi * math.e)
    print("extent,points,spacing,error,ratio")
    for extent in args.extent:
        prev = None
        for pts in args.points:
            g = GridSpec.symmetric(pts, extent)
            x = g.axis(0)
            p = np.exp(-(x**2)) / math.sqrt(math.pi)
            try:
                err = abs(shannon_entropy(p, g) - exact)
            except ValueError:
                # too coarse for the mass check; the estimator refuses it
                print(f"{extent},{pts},{g.spacing[0]:.6g},under-resolved,")
                prev = None
                continue
            ratio = prev / err if prev and err > 0 else float("nan")
            print(f"{extent},{pts},{g.spacing[0]:.6g},{err:.3e},{ratio:.3g}")
            prev = err


if __name__ == "__main__":
    main()
