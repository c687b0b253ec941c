# SPDX-License-Identifier: Apache-2.0
#
# Reference values for the special-function tests, computed with mpmath at
# 50 digits and written to tests/fixtures/reference.json.
#
#   bessel: J0, J1, Y0, Y1, e^x K0, e^x K1 at 50 log-spaced x in (0.1, 1000]
#   phi:    Phi(r) = i/(8k^2) (H0(kr) - H0(ikr)) and d^j Phi/dr^j, j <= 5,
#           by mpmath high-precision differentiation of the closed form
#
# Usage: python3 gen_reference.py [OUT]
import json
import sys

import mpmath as mp

mp.mp.dps = 50


def phi(r, k):
    # H0(i z) = (2/(pi i)) K0(z) for z > 0
    h_real = mp.hankel1(0, k * r)
    h_imag = 2 / (mp.pi * 1j) * mp.besselk(0, k * r)
    return 1j / (8 * k**2) * (h_real - h_imag)


def cnum(z):
    z = mp.mpc(z)
    return [mp.nstr(z.real, 25), mp.nstr(z.imag, 25)]


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/reference.json"
    # Rounded to double so the reference is exact for the tested input.
    xs = [mp.mpf(float(mp.mpf(10) ** (-1 + 4 * mp.mpf(i + 1) / 50))) for i in range(50)]
    bessel = []
    for x in xs:
        bessel.append(
            {
                "x": repr(float(x)),
                "j0": mp.nstr(mp.besselj(0, x), 25),
                "j1": mp.nstr(mp.besselj(1, x), 25),
                "y0": mp.nstr(mp.bessely(0, x), 25),
                "y1": mp.nstr(mp.bessely(1, x), 25),
                "k0_scaled": mp.nstr(mp.exp(x) * mp.besselk(0, x), 25),
                "k1_scaled": mp.nstr(mp.exp(x) * mp.besselk(1, x), 25),
            }
        )
    cases = []
    for k, r in [(1, 1), (1, 0.05), (1, 0.5), (2 * mp.pi, 0.02), (2 * mp.pi, 0.3),
                 (2 * mp.pi, 1.7), (10 * mp.pi, 0.9), (3, 25)]:
        k, r = mp.mpf(float(k)), mp.mpf(float(r))
        derivs = [cnum(mp.diff(lambda t: phi(t, k), r, j)) for j in range(6)]
        cases.append({"k": repr(float(k)), "r": repr(float(r)), "derivs": derivs})
    doc = {
        "generator": "tools/gen_reference.py (mpmath, 50 digits)",
        "bessel": bessel,
        "phi": cases,
        "phi_at_zero_k1": cnum(1j / 8),
    }
    with open(out, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
