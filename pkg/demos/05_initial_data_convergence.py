"""How fast does the ensemble approach the initial profile?

Run:  python demos/05_initial_data_convergence.py [N ...]

Inside the support the sup error decays roughly like eps^(1/2); outside it
decays faster but only slowly reaches its asymptotic eps^2 rate.  The demo
prints both sup errors for each N and the fitted exponents.
"""
import sys

from semiclassical_ensembles import convergence as cv
from semiclassical_ensembles import potentials as pot
from semiclassical_ensembles import scattering as sc

Ns = [int(v) for v in sys.argv[1:]] or [20, 30, 40]
fam = pot.make_hirota(1.0, -0.5, 0.5, 2 / 3)
print("N    eps        interior sup    exterior sup")
for N in Ns:
    spec = sc.spectral_data(fam, N)
    inner = cv.sup_error(spec, cv.HIROTA_INTERIOR)
    outer = cv.sup_error(spec, cv.HIROTA_EXTERIOR)
    print(f"{N:<4d} {spec.epsilon:<10.6g} {inner[0]:<15.6e} {outer[0]:.6e} (at x={outer[1]:+.3f})")
if len(Ns) >= 3:
    print(f"\ninterior exponent {cv.converge_fit(fam, Ns, cv.HIROTA_INTERIOR).exponent:.4f}")
    print(f"exterior exponent {cv.converge_fit(fam, Ns, cv.HIROTA_EXTERIOR).exponent:.4f}")
