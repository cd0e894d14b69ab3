"""Regenerate the reference constants frozen into the tests.

Each value is a 30-digit adaptive quadrature of a defining integral, so it
does not share code or formulas with the closed forms it checks. Run with
``python3 tools/oracles.py``; needs ``mpmath``.
"""

import mpmath as mp

mp.mp.dps = 30
pi = mp.pi


def kernel(u, x, y, b, r, h):
    return mp.sqrt(h * r) * mp.exp(-pi * h * ((r**2 - 1j * b) * (u - y) ** 2 + 2j * (u - y) * x))


def transform(f, p, h):
    x, y, b, r = p
    return mp.quad(lambda u: f(u) * kernel(u, x, y, b, r, h), [-mp.inf, y - 3, y, y + 3, mp.inf])


def conj_kernel(u, x, y, b, r, h):
    return mp.sqrt(h * r) * mp.exp(-pi * h * ((r**2 + 1j * b) * (u - y) ** 2 - 2j * (u - y) * x))


def beam(k, a, t, s1, s2):
    def integrand(k1):
        return mp.exp((2 * k1**2 - k**2) * t / (8j * pi) - 1j * k1 * s1 - 1j * mp.sqrt(k**2 - k1**2) * s2 - a * k1**2)

    return mp.quad(integrand, [-k, 0, k])


def main():
    sigma = mp.mpc(1.3, 0.4)
    out = {
        "WP_GENERIC": transform(lambda u: mp.exp(-pi * sigma * u**2 - 1j * pi * u), (0.3, -0.2, 0.5, 1.1), 1.7),
        "PW_K1": transform(lambda u: mp.exp(-1j * u), (0, 1, 0, 1), 1),
        "PW_GENERIC": transform(lambda u: mp.exp(-2.3j * u), (-0.4, 0.7, -0.6, 0.9), 0.8),
        "DELTA0": kernel(0, 0.3, -0.4, 0.7, 1.2, 1.3),
        "DELTA1": mp.diff(lambda u: kernel(u, 0.3, -0.4, 0.7, 1.2, 1.3), 0),
        "KERNEL": transform(lambda u: conj_kernel(u, 0.3, -0.2, 0.5, 1.1, 1.4), (-0.4, 0.6, -0.3, 0.8), 1.4),
        "D0_EXAMPLE": transform(lambda u: (4 * pi**2 * u**2 - 2 * pi) * mp.exp(-pi * u**2), (0.2, 0.1, 0, 1), 1),
        "BEAM_F3": beam(2, 0.5, 0.1j, 0.2, 0.3),
        "BEAM_FIELD": beam(2 * pi, 8, 0, 0.7, 1.9),
        "SQRT_PI_ERF2": mp.sqrt(pi) * mp.erf(2),
    }
    for name, value in out.items():
        print(f"{name} = {mp.nstr(value, 30)}")


if __name__ == "__main__":
    main()
