#!/usr/bin/env python3
"""Write a deterministic synthetic layered permeability/porosity raster.

Three layers of lognormal permeability with a horizontal correlation length,
porosity correlated with log-permeability. Values are written x fastest,
then y, then z, one per line.
"""

import argparse
import pathlib

import numpy as np


def smooth(field, length):
    """Periodic Gaussian filter along the two horizontal axes."""
    ny, nx = field.shape
    kx = np.fft.fftfreq(nx)
    ky = np.fft.fftfreq(ny)
    kernel = np.exp(-2.0 * (np.pi * length) ** 2 * (kx[None, :] ** 2 + ky[:, None] ** 2))
    out = np.real(np.fft.ifft2(np.fft.fft2(field) * kernel))
    return (out - out.mean()) / out.std()


def make(nx, ny, nz, seed):
    rng = np.random.default_rng(seed)
    # layer means of log10 K (m^2) and log-std
    means = [-12.5, -14.0, -13.0]
    sigmas = [0.6, 0.9, 0.5]
    logk = np.empty((nz, ny, nx))
    for k in range(nz):
        g = smooth(rng.standard_normal((ny, nx)), length=3.0)
        logk[k] = means[k % len(means)] + sigmas[k % len(sigmas)] * g
    logk = np.clip(logk, -15.5, -11.5)
    perm = 10.0 ** logk
    poro = np.clip(0.2 + 0.05 * (logk + 13.0), 0.05, 0.4)
    return perm, poro


def write(path, values):
    with open(path, "w", encoding="ascii") as f:
        for v in values.reshape(-1):
            f.write(f"{v:.6e}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="32,32,3")
    ap.add_argument("--seed", type=int, default=20240521)
    ap.add_argument("--out", default="cases/raster")
    args = ap.parse_args()
    nx, ny, nz = (int(t) for t in args.dims.split(","))
    perm, poro = make(nx, ny, nz, args.seed)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    # (nz, ny, nx) row-major flattening is x fastest
    write(out / "permeability.txt", perm)
    write(out / "porosity.txt", poro)


if __name__ == "__main__":
    main()
