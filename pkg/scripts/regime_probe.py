"""Measure agent velocities next to clusters of increasing size in the spatial world.

For each cluster size the probe agent runs one sense / update / move cycle
many times; the output table shows the mean signed velocity with its standard
error, the mean speed, and the regime of that size under the matching kernel
scales.

    python3 scripts/regime_probe.py --trials 1000 --out regime_probe.csv
"""
import argparse
import math

import numpy as np

from fepnet.io import write_csv
from fepnet.kernel import AgentLimits, KernelSpec, characteristic_scales, classify_regime
from fepnet.spatial import WorldConfig, probe_velocities


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1, 2, 5, 10, 20, 40, 80, 160, 320])
    ap.add_argument("--p-detect", type=float, default=0.5)
    ap.add_argument("--var-d", type=float, default=4.0)
    ap.add_argument("--prior-var", type=float, default=1.0)
    ap.add_argument("--b-max", type=float, default=10.0)
    ap.add_argument("--v-max", type=float, default=1.5)
    ap.add_argument("--k-max", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="regime_probe.csv")
    args = ap.parse_args()

    cfg = WorldConfig(sense_range=10.0, p_detect=args.p_detect, var_d=args.var_d,
                      prior_var=args.prior_var, b_max=args.b_max, v_max=args.v_max,
                      k_max=args.k_max).validate()
    limits = AgentLimits(args.k_max or math.inf, cfg.belief_cap, cfg.v_max)
    spec = KernelSpec(cfg.lik, cfg.prior, limits, gain=cfg.gain, eta=cfg.detection.eta)
    scales = characteristic_scales(spec)
    print(f"d_noise = {scales.d_noise:.2f}, k_star = {scales.k_star:.2f}")

    rng = np.random.default_rng(args.seed)
    rows = []
    for d in args.sizes:
        v = probe_velocities(cfg, d, 0, args.trials, rng)
        row = {"d": d, "mean_v": float(v.mean()),
               "se_v": float(v.std(ddof=1) / math.sqrt(len(v))),
               "mean_speed": float(np.abs(v).mean()),
               "regime": classify_regime(d, scales).value}
        rows.append(row)
        print(f"d={d:>4}  v = {row['mean_v']:+.3f} +- {row['se_v']:.3f}  "
              f"|v| = {row['mean_speed']:.3f}  {row['regime']}")
    write_csv(args.out, rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
