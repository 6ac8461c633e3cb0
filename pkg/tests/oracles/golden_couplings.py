"""One-off mpmath evaluation of the coupling formulas.

Run directly to regenerate the golden constants frozen in test_model.py.
Kept independent of the package: no entangler imports.
"""
import mpmath as mp

mp.mp.dps = 40


def couplings(g, delta, kappa, eps, phi, att=(1, 1, 1)):
    # phi = (phi21, phi32, phi13); att = exp(-nu*L) per link, same order
    chi = g**2 / delta
    m = 1j * delta + kappa
    e21, e32, e13 = (a * mp.exp(1j * p) for a, p in zip(att, phi))
    w3 = kappa**3 * e21 * e32 * e13
    den = m**3 - w3
    a1 = (m**2 * eps[0] + kappa**2 * e32 * e13 * eps[1] + m * kappa * e13 * eps[2]) / den
    a2 = (m**2 * eps[1] + kappa**2 * e13 * e21 * eps[2] + m * kappa * e21 * eps[0]) / den
    a3 = (m**2 * eps[2] + kappa**2 * e21 * e32 * eps[0] + m * kappa * e32 * eps[1]) / den
    pre = 2 * kappa * chi**2
    j12 = pre * mp.im(a1 * mp.conj(a2) * (m * e21 + kappa * e32 * e13) / den)
    j23 = pre * mp.im(a2 * mp.conj(a3) * (m * e32 + kappa * e13 * e21) / den)
    j31 = pre * mp.im(a3 * mp.conj(a1) * (m * e13 + kappa * e21 * e32) / den)
    return (a1, a2, a3), (j12, j23, j31)


if __name__ == "__main__":
    phi0 = mp.pi / 2
    (a, _, _), (j0, _, _) = couplings(1, 20, 20, (1, 1, 1), (phi0,) * 3)
    print("alpha0 =", mp.nstr(a, 20))
    print("J0     =", mp.nstr(j0, 20))
    att = mp.exp(-mp.mpf("0.08"))
    _, (j0l, _, _) = couplings(1, 20, 20, (1, 1, 1), (phi0,) * 3, (att,) * 3)
    print("J(L=1)/J0 =", mp.nstr(j0l / j0, 20))

    def ratio(L):
        a = mp.exp(-mp.mpf("0.08") * L)
        return couplings(1, 20, 20, (1, 1, 1), (phi0,) * 3, (a,) * 3)[1][0] / j0 - mp.mpf("0.9")

    print("L(ratio=0.9) =", mp.nstr(mp.findroot(ratio, 0.6), 20))
    # asymmetric case for a regression golden
    (a1, a2, a3), (j12, j23, j31) = couplings(
        1, 20, 18, (1, 0.5 + 0.2j, -0.3j), (0.3, 1.1, 2.0)
    )
    for name, v in [("a1", a1), ("a2", a2), ("a3", a3)]:
        print(name, mp.nstr(v, 20))
    for name, v in [("j12", j12), ("j23", j23), ("j31", j31)]:
        print(name, mp.nstr(v, 20))
