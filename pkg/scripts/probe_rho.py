"""Exploratory probes on noise correlation ρ (not invariants).

Prints the zero-horizon rate for a range of ρ, whether GC(h) for −ρ ever
crosses GC(h) for +ρ on 0 < h ≤ 150 ms, and the largest horizon at which
GC(h) is still above 1e-10 while the rate is positive.
"""
import numpy as np

from ctgranger.minimal import MinimalCtvarParams, gc_horizon, rate_numeric

REF = MinimalCtvarParams.reference()
H = np.linspace(0.05, 150.0, 3000)


def main():
    print("rho     rate (nats/ms)")
    for rho in (0.0, 0.1, 0.25, 0.5, 0.75, 0.9):
        print(f"{rho:+.2f}  {rate_numeric(REF.replace(rho=rho)):.8f}  "
              f"{rate_numeric(REF.replace(rho=-rho)):.8f} (for -rho)")
    for rho in (0.25, 0.5, 0.75):
        pos = gc_horizon(REF.replace(rho=rho), H)
        neg = gc_horizon(REF.replace(rho=-rho), H)
        sign = np.sign(neg - pos)
        flips = H[1:][np.diff(sign) != 0]
        print(f"|rho|={rho}: GC(-rho) - GC(+rho) changes sign at h = {np.round(flips, 2).tolist()}")
    g = gc_horizon(REF, H)
    print(f"rho=0: min GC(h) over grid {g.min():.3e}; GC(h) > 1e-10 up to h = {H[g > 1e-10].max():.1f}")


if __name__ == "__main__":
    main()
