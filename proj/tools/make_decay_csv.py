#!/usr/bin/env python3
"""Writes the synthetic readout-decay CSVs in data/.

eta(t) = exp(-t^2 / (2 tau_k^2) - t^4 / (2 tau_beta^4)), times 1 + N(0, 0.01).
"""
import argparse
import math
import random
from pathlib import Path

TAU_K = 173e-6
TAU_BETA = 175.4e-6


def envelope(t, tau_k, tau_beta):
    e = -t * t / (2 * tau_k**2)
    if tau_beta is not None:
        e -= t**4 / (2 * tau_beta**4)
    return math.exp(e)


def write(path, tau_beta, rng, n=40, dt=7.5e-6, noise=0.01):
    with open(path, "w", newline="\n") as f:
        f.write("t_s,amplitude\n")
        for i in range(n):
            t = i * dt
            a = envelope(t, TAU_K, tau_beta) * (1 + rng.gauss(0.0, noise))
            f.write(f"{t:.9e},{a:.9e}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    write(out / "decay_gradient_off.csv", None, rng)
    write(out / "decay_gradient_on.csv", TAU_BETA, rng)


if __name__ == "__main__":
    main()
