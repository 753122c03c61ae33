"""Independent reference computations used to freeze expected values."""

import mpmath as mp


def ellip_series(m, dps=40):
    """K(m), E(m) from their Maclaurin series, summed term by term."""
    with mp.workdps(dps):
        m = mp.mpf(m)
        K = E = mp.mpf(0)
        coef = mp.mpf(1)  # ((2n)! / (4^n n!^2))^2
        n = 0
        while True:
            term = coef * m**n
            K += term
            E += term / (1 - 2 * n)
            if term < mp.mpf(10) ** (-dps):
                break
            n += 1
            coef *= (mp.mpf(2 * n - 1) / (2 * n)) ** 2
        return mp.pi / 2 * K, mp.pi / 2 * E


def flux_integrand_ixx(m, t):
    """Full (m, t) integrand for I_xx, transcribed term by term."""
    c, s = mp.cos(t), mp.sin(t)
    num = (c * ((3 * m - 2) * c - 1) * (m / (c + 1) + (m - 1) * c - mp.mpf(1) / 2)
           * (m**2 * (2 * c + 1) / (c + 1) ** 2 + (m - 1) ** 2 * s**2))
    return num / (mp.cos(t / 2) ** 2 * mp.sqrt(2 * c + 1))


def flux_integrand_iyy(m, t):
    c, s = mp.cos(t), mp.sin(t)
    num = (2 * (1 - m) * s**2 * ((2 - 3 * m) * c + 1)
           * ((m - 1) ** 2 * c**2 - (m - 1) * c + m * (2 * m + 1 / (c + 1) - 2) + mp.mpf(1) / 4))
    return num / ((c + 1) * mp.sqrt(2 * c + 1))
