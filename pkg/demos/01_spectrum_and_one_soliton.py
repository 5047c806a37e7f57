"""Eigenvalues of the semicircle family and the smallest ensemble.

Run:  python demos/01_spectrum_and_one_soliton.py

The semicircle has explicit eigenvalues, so the first table is a direct
check of the root finder.  With N = 1 the ensemble is a single sech pulse
whose centre is offset by a logarithmic shift; the second table compares
the solver against that formula.
"""
import math

import numpy as np

from semiclassical_ensembles import ensemble as en
from semiclassical_ensembles import potentials as pot
from semiclassical_ensembles import scattering as sc

fam = pot.make_semicircle(1.0, -0.5, 0.5)

print("N    eps        largest s      smallest s     max |s - closed form|")
for N in (1, 2, 5, 20, 80):
    spec = sc.spectral_data(fam, N)
    exact = np.sqrt(1 - (2 * np.arange(N) + 1) / (2 * N))
    print(f"{N:<4d} {spec.epsilon:<10.6g} {spec.s_tilde[0]:<14.10f} {spec.s_tilde[-1]:<14.10f} "
          f"{np.max(np.abs(spec.s_tilde - exact)):.1e}")

spec = sc.spectral_data(fam, 1)
s0, eps = spec.s_tilde[0], spec.epsilon
shift = eps / (2 * s0) * math.log(math.sqrt(2) / (2 * s0))
print("\nx       psi (solver)         sech formula")
for x in np.linspace(-0.6, 0.6, 7):
    psi = en.evaluate(spec, x).psi
    print(f"{x:+.2f}   {psi.real:.15f}   {2 * s0 / math.cosh(2 * s0 * (x - shift) / eps):.15f}")

print("\nSquared L2 norm 4 eps sum(s) against the limit 2/3:")
for N in (10, 20, 40, 80):
    print(f"  N={N:<3d} {sc.trace_l2(sc.spectral_data(fam, N)):.10f}")
