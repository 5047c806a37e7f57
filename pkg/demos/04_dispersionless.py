"""Dispersionless limits: Talanov collapse, ASK breaking, interpolation family.

Run:  python demos/04_dispersionless.py
"""
import math

import numpy as np

from semiclassical_ensembles import dispersionless as dl

p = dl.TalanovParams.from_amplitude(1.0, 0.5)
print(f"Talanov orbit A_max=1, w0=1/2: lifetime {dl.talanov_duration(p):.12f} (pi/4 = {math.pi / 4:.12f})")
tr = dl.width_trajectory(p, 1.0)
print(f"integrated collapse at t = {tr.collapse_time:.10f}")
for t in np.linspace(0, 0.38, 5):
    w, dw = dl.width_solve(p, t)
    print(f"  t={t:.3f}  w={w:.6f}  w'={dw:+.6f}  peak density {p.F / w:.4f}")

print("\nASK sech data: on-axis density approaches 2 A_max^2 at t = 1/(2 A_max)")
for t in (0.0, 0.25, 0.45, 0.499, 0.5):
    print(f"  t={t:<6} rho(0,t)={dl.ask_axis(1.0, t):.10f}")
st = dl.ask_solve(1.0, 0.7, 0.4)
print(f"off-axis solve at (0.7, 0.4): rho={st.rho:.8f}, mu={st.mu:.8f}, residual {st.residual:.1e}")

print("\nInterpolation family: catastrophe density and time")
for d in (0.0, 0.01, 0.25, 0.5, 0.75, 1.0):
    c = dl.interpolation_catastrophe(d)
    tag = "  (collapse)" if c.collapse else ""
    print(f"  delta={d:<5} rho_c={c.rho_c:<10.6g} t_c={c.t_c:.8f}{tag}")
