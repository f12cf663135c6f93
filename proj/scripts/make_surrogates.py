#!/usr/bin/env python3
"""Generate synthetic stand-ins for the nine effort datasets.

The real SEACRAFT files are not redistributed here. Each surrogate has the
published row count and column names, and every column matches the published
min and max exactly and the mean/std approximately. Columns are drawn from
Beta marginals joined by a Gaussian copula in which size-like features track
effort. Nothing here is real project data; use it for smoke runs and schema
checks only.

    python3 scripts/make_surrogates.py [--out data/surrogate] [--seed 20181]
"""

import argparse
import csv
from pathlib import Path

import numpy as np
from scipy import stats

# name, min, max, mean, std, size_like, dropped
DATASETS = {
    "kemerer": (15, [
        ("Language", 1, 3, 1.2, 0.6, False, False),
        ("Hardware", 1, 6, 2.3, 1.7, False, False),
        ("Duration", 5, 31, 14.3, 7.5, True, True),
        ("KSLOC", 39, 450, 186.6, 136.8, True, True),
        ("AdjFP", 100, 2307, 999.1, 589.6, True, False),
        ("RAWFP", 97, 2284, 993.9, 597.4, True, True),
        ("Effort", 23, 1107, 219.2, 263.1, None, False),
    ]),
    "albrecht": (24, [
        ("Input", 7, 193, 40.2, 36.9, True, False),
        ("Output", 12, 150, 47.2, 35.2, True, False),
        ("Inquiry", 0, 75, 16.9, 19.3, True, False),
        ("File", 3, 60, 17.4, 15.5, True, False),
        ("FPAdj", 1, 1, 1.0, 0.1, False, True),
        ("RawFPs", 190, 1902, 638.5, 452.7, True, True),
        ("AdjFP", 199, 1902, 647.6, 488.0, True, True),
        ("Effort", 0, 105, 21.9, 28.4, None, False),
    ]),
    "isbsg10": (37, [
        ("UFP", 1, 2, 1.2, 0.4, False, False),
        ("IS", 1, 10, 3.2, 3.0, False, False),
        ("DP", 1, 5, 2.6, 1.1, False, False),
        ("LT", 1, 3, 1.6, 0.8, False, False),
        ("PPL", 1, 14, 5.1, 4.1, False, False),
        ("CA", 1, 2, 1.1, 0.3, False, False),
        ("FS", 44, 1371, 343.8, 304.2, True, False),
        ("RS", 1, 4, 1.7, 0.9, False, False),
        ("FPS", 1, 5, 3.5, 0.7, False, False),
        ("Effort", 87, 14453, 2959, 3518, None, False),
    ]),
    "finnish": (38, [
        ("hw", 1, 3, 1.3, 0.6, False, False),
        ("at", 1, 5, 2.2, 1.5, False, False),
        ("FP", 65, 1814, 763.6, 510.8, True, False),
        ("co", 2, 10, 6.3, 2.7, False, False),
        ("prod", 1, 29, 10.1, 7.1, False, True),
        ("lnsize", 4, 8, 6.4, 0.8, True, True),
        ("lneff", 6, 10, 8.4, 1.2, True, True),
        ("Effort", 460, 26670, 7678, 7135, None, False),
    ]),
    "miyazaki": (48, [
        ("KLOC", 7, 390, 63.4, 71.9, True, True),
        ("SCRN", 0, 150, 28.4, 30.4, True, False),
        ("FORM", 0, 76, 20.9, 18.1, True, False),
        ("FILE", 2, 100, 27.7, 20.4, True, False),
        ("ESCRN", 0, 2113, 473.0, 514.3, True, False),
        ("EFORM", 0, 1566, 447.1, 389.6, True, False),
        ("EFILE", 57, 3800, 936.6, 709.4, True, False),
        ("Effort", 6, 340, 55.6, 60.1, None, False),
    ]),
    "maxwell": (62, [
        ("App", 1, 5, 2.4, 1.0, False, False),
        ("Har", 1, 5, 2.6, 1.0, False, False),
        ("Dba", 0, 4, 1.0, 0.4, False, False),
        ("Ifc", 1, 2, 1.9, 0.2, False, False),
        ("Source", 1, 2, 1.9, 0.3, False, False),
        ("Telon.", 0, 1, 0.2, 0.4, False, False),
        ("Nlan", 1, 4, 2.5, 1.0, False, False),
        ("T01", 1, 5, 3.0, 1.0, False, False),
        ("T02", 1, 5, 3.0, 0.7, False, False),
        ("T03", 2, 5, 3.0, 0.9, False, False),
        ("T04", 2, 5, 3.2, 0.7, False, False),
        ("T05", 1, 5, 3.0, 0.7, False, False),
        ("T06", 1, 4, 2.9, 0.7, False, False),
        ("T07", 1, 5, 3.2, 0.9, False, False),
        ("T08", 2, 5, 3.8, 1.0, False, False),
        ("T09", 2, 5, 4.1, 0.7, False, False),
        ("T10", 2, 5, 3.6, 0.9, False, False),
        ("T11", 2, 5, 3.4, 1.0, False, False),
        ("T12", 2, 5, 3.8, 0.7, False, False),
        ("T13", 1, 5, 3.1, 1.0, False, False),
        ("T14", 1, 5, 3.3, 1.0, False, False),
        ("T15", 1, 5, 3.3, 0.7, False, False),
        ("Dura.", 4, 54, 17.2, 10.7, True, True),
        ("Size", 48, 3643, 673.3, 784.1, True, False),
        ("Time", 1, 9, 5.6, 2.1, False, True),
        ("Effort", 583, 63694, 8223, 10500, None, False),
    ]),
    "desharnais": (77, [
        ("TeamExp", 0, 4, 2.3, 1.3, False, False),
        ("MngExp", 0, 7, 2.6, 1.5, False, False),
        ("Length", 1, 36, 11.3, 6.8, True, True),
        ("Trans.s", 9, 886, 177.5, 146.1, True, False),
        ("Entities", 7, 387, 120.5, 86.1, True, False),
        ("AdjPts", 73, 1127, 298.0, 182.3, True, False),
        ("Effort", 546, 23940, 4834, 4188, None, False),
    ]),
    "kitchenham": (145, [
        ("code", 1, 6, 2.1, 0.9, False, False),
        ("type", 0, 6, 2.4, 0.9, False, False),
        ("duration", 37, 946, 206.4, 134.1, True, True),
        ("fun_pts", 15, 18137, 527.7, 1522, True, False),
        ("estimate", 121, 79870, 2856, 6789, True, True),
        ("esti_mtd", 1, 5, 2.5, 0.9, False, True),
        ("Effort", 219, 113930, 3113, 9598, None, False),
    ]),
    "china": (499, [
        ("AFP", 9, 17518, 486.9, 1059, True, True),
        ("Input", 0, 9404, 167.1, 486.3, True, False),
        ("Output", 0, 2455, 113.6, 221.3, True, False),
        ("Enquiry", 0, 952, 61.6, 105.4, True, False),
        ("File", 0, 2955, 91.2, 210.3, True, False),
        ("Interface", 0, 1572, 24.2, 85.0, True, False),
        ("Added", 0, 13580, 360.4, 829.8, True, True),
        ("changed", 0, 5193, 85.1, 290.9, True, True),
        ("Deleted", 0, 2657, 12.4, 124.2, False, True),
        ("PDR_A", 0, 84, 11.8, 12.1, False, True),
        ("PDR_U", 0, 97, 12.1, 12.8, False, True),
        ("NPDR_A", 0, 101, 13.3, 14.0, False, True),
        ("NPDU_U", 0, 108, 13.6, 14.8, False, True),
        ("Resource", 1, 4, 1.5, 0.8, False, False),
        ("Dev.Type", 0, 0, 0.0, 0.0, False, True),
        ("Duration", 1, 84, 8.7, 7.3, True, True),
        ("Effort", 26, 54620, 3921, 6481, None, False),
    ]),
}

SIZE_CORRELATION = 0.8
OTHER_CORRELATION = 0.15


def beta_column(latent, lo, hi, mean, std):
    if hi <= lo:
        return np.full(latent.shape, float(lo))
    m = (mean - lo) / (hi - lo)
    v = (std / (hi - lo)) ** 2
    m = min(max(m, 1e-3), 1 - 1e-3)
    v = min(v, 0.95 * m * (1 - m))
    common = m * (1 - m) / v - 1
    a, b = max(m * common, 0.05), max((1 - m) * common, 0.05)
    u = stats.norm.cdf(latent)
    x = lo + (hi - lo) * stats.beta.ppf(u, a, b)
    x[np.argmin(latent)] = lo
    x[np.argmax(latent)] = hi
    return np.rint(x)


def generate(name, rows, columns, rng):
    effort_latent = rng.standard_normal(rows)
    out = {}
    for col, lo, hi, mean, std, size_like, _ in columns:
        if size_like is None:
            latent = effort_latent
        else:
            rho = SIZE_CORRELATION if size_like else OTHER_CORRELATION
            latent = rho * effort_latent + np.sqrt(1 - rho * rho) * rng.standard_normal(rows)
        out[col] = beta_column(latent, lo, hi, mean, std)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "surrogate"))
    ap.add_argument("--seed", type=int, default=20181)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for name, (rows, columns) in DATASETS.items():
        data = generate(name, rows, columns, rng)
        names = [c[0] for c in columns]
        with open(out / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for i in range(rows):
                w.writerow([int(data[n][i]) for n in names])
        with open(out / f"{name}.drop", "w") as fh:
            fh.write(f"# columns removed from {name} before modelling\n")
            for c in columns:
                if c[6]:
                    fh.write(c[0] + "\n")
        print(f"{name}: {rows} rows, {len(names) - 1} features")


if __name__ == "__main__":
    main()
