"""Reference values of Si, Ci, f and g at 200 log-spaced points in [1e-6, 1e4].

Computed with mpmath at 50 significant digits; rerun to regenerate sici.csv.
"""
import mpmath as mp

mp.mp.dps = 50
N = 200
with open("sici.csv", "w") as out:
    out.write("x,si,ci,f,g\n")
    for i in range(N):
        x = mp.mpf(10) ** (mp.mpf(-6) + mp.mpf(10) * i / (N - 1))
        x = mp.mpf(float(x))  # the test feeds the double-rounded abscissa
        si, ci = mp.si(x), mp.ci(x)
        s, c = mp.sin(x), mp.cos(x)
        f = ci * s - (si - mp.pi / 2) * c
        g = -ci * c - (si - mp.pi / 2) * s
        out.write(",".join(mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in (x, si, ci, f, g)) + "\n")
