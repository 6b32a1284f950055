"""Exact batch and erasure batch parameters for TD(3, a), where only bounds are known.

Also times the row-subset enumeration per design.

    python3 scripts/exact_t_survey.py --alpha 6 7 8 --delta 0 1 2
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from frbcodes.analysis import contained_profile, ecbc_t, td3_upper_witness
from frbcodes.designs import build_td, incidence


@dataclass
class SurveyConfig:
    alphas: tuple[int, ...] = (4, 5, 6, 7, 8)
    deltas: tuple[int, ...] = (0, 1, 2)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=int, nargs="+")
    ap.add_argument("--delta", type=int, nargs="+")
    args = ap.parse_args()
    cfg = SurveyConfig(
        tuple(args.alpha) if args.alpha else SurveyConfig.alphas,
        tuple(args.delta) if args.delta else SurveyConfig.deltas,
    )
    for a in cfg.alphas:
        design = build_td(3, a)
        m = incidence(design)
        t0 = time.perf_counter()
        contained_profile(m)
        dt = time.perf_counter() - t0
        ts = {d: ecbc_t(m, d).t for d in cfg.deltas if d < 3}
        w = td3_upper_witness(m, a) if a >= 7 else None
        extra = f"  (2a+2)-column witness: {w.columns}" if w else ""
        print(f"TD(3,{a}) [{design.construction}] n={m.n} t by delta: {ts}  enum {dt:.2f}s{extra}")


if __name__ == "__main__":
    main()
