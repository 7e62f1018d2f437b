"""Arbitrary-precision reference values frozen into the Rust test suites.

Run with `python3 oracles.py`; every printed value is copied verbatim into the
tests that cite it. Nothing here shares code with the Rust implementation.
"""
import mpmath as mp

mp.mp.dps = 40

C, G, M, Y = mp.mpf("0.5"), mp.mpf(2), mp.mpf("3.6"), mp.mpf("1.5")


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


def cgmy_exponent(u, c, g, m, y, sigma):
    gm = mp.gamma(-y)
    drift = -c * gm * ((m - 1) ** y + (g + 1) ** y - m ** y - g ** y) - sigma ** 2 / 2
    return (1j * drift * u - sigma ** 2 * u ** 2 / 2
            + c * gm * ((m - 1j * u) ** y + (g + 1j * u) ** y - m ** y - g ** y))


def atm_call_lewis(t, c, g, m, y, sigma):
    # C = 1 - (1/pi) int_0^inf Re[phi(u - i/2)] / (u^2 + 1/4) du  (S0 = K = 1)
    f = lambda u: mp.re(mp.exp(t * cgmy_exponent(u - 0.5j, c, g, m, y, sigma))) / (u ** 2 + mp.mpf(1) / 4)
    return 1 - mp.quad(f, [0, 1, 10, 100, mp.inf]) / mp.pi


show("gamma(-1.2)", mp.gamma(mp.mpf("-1.2")))
z = mp.mpc("3.6", "-1") ** mp.mpf("1.5")
show("re (3.6-i)^1.5", mp.re(z))
show("im (3.6-i)^1.5", mp.im(z))

gm = mp.gamma(-Y)
drift = -C * gm * ((M - 1) ** Y + (G + 1) ** Y - M ** Y - G ** Y)
show("martingale drift base sigma=0", drift)
eta = C * gm * ((M - 1) ** Y + (G + 1) ** Y)
show("eta base", eta)
gamma_tilde = -C * gm * ((M - 1) ** Y + (G + 1) ** Y - M ** Y - G ** Y)
show("gamma_tilde base sigma=0", gamma_tilde)
phi = mp.exp(mp.mpf("0.1") * cgmy_exponent(mp.mpf(1), C, G, M, Y, 0))
show("re phi(t=0.1,u=1)", mp.re(phi))
show("im phi(t=0.1,u=1)", mp.im(phi))

# positive-part mean of the symmetric stable law
d1 = mp.gamma(1 - 1 / Y) * (2 * C * gm * abs(mp.cos(mp.pi * Y / 2))) ** (1 / Y) / mp.pi
show("d1 base", d1)
d2 = C * gm / 2 * ((M - 1) ** Y - M ** Y - (G + 1) ** Y + G ** Y)
show("d2 pure jump base", d2)

# independent route to d2: direct numerical integrals of the q-bar representation
qbar = lambda x: mp.exp(-M * x) if x > 0 else mp.exp(G * x)


def combined_numerator(x):
    # e^x qbar(x) - qbar(x) - x; the quadratic Taylor term replaces it where the
    # difference would cancel below working precision
    if abs(x) < mp.mpf("1e-15"):
        slope = M if x > 0 else -G
        return (mp.mpf(1) / 2 - slope) * x ** 2
    return mp.exp(x) * qbar(x) - qbar(x) - x


with mp.workdps(80):
    ip = mp.quad(lambda x: combined_numerator(x) * x ** (-Y - 1), [0, 1, mp.inf])
    im_ = mp.quad(lambda x: combined_numerator(x) * abs(x) ** (-Y - 1), [-mp.inf, -1, 0])
show("d2 via combined integrals", C * ip / 2 - C * im_ / 2)

for sigma in [mp.mpf("0.4"), mp.mpf("0.1")]:
    d2m = 2 ** ((1 - Y) / 2) / mp.sqrt(mp.pi) * mp.gamma(1 - Y / 2) * (2 * C) * sigma ** (1 - Y) / (2 * Y * (Y - 1))
    s2m = (2 * C) * 2 ** (-Y / 2) / (Y * (Y - 1)) * mp.gamma(1 - Y / 2) * sigma ** (1 - Y)
    show(f"d2 mixed sigma={sigma}", d2m)
    show(f"s2 mixed sigma={sigma}", s2m)

tail_mass = mp.quad(lambda x: C * mp.exp(-M * x) * x ** (-1 - Y), [mp.mpf("0.1"), 1, mp.inf]) + \
    mp.quad(lambda x: C * mp.exp(G * x) * abs(x) ** (-1 - Y), [-mp.inf, -1, mp.mpf("-0.1")])
show("levy mass |x|>0.1 base", tail_mass)

big_jumps = mp.quad(lambda x: x * C * mp.exp(-M * x) * x ** (-1 - Y), [1, mp.inf]) + \
    mp.quad(lambda x: x * C * mp.exp(G * x) * abs(x) ** (-1 - Y), [-mp.inf, -1])
b_closed = drift - big_jumps - C * Y * gm * (M ** (Y - 1) - G ** (Y - 1))
show("b closed form base sigma=0", b_closed)
with mp.workdps(80):
  b_direct = -(mp.quad(lambda x: (x ** 2 / 2 if abs(x) < 1e-15 else mp.expm1(x) - x) * C * mp.exp(-M * x) * x ** (-Y - 1), [0, 1])
             + mp.quad(lambda x: (mp.exp(x) - 1) * C * mp.exp(-M * x) * x ** (-Y - 1), [1, mp.inf])
             + mp.quad(lambda x: (x ** 2 / 2 if abs(x) < 1e-15 else mp.expm1(x) - x) * C * mp.exp(G * x) * abs(x) ** (-Y - 1), [-1, 0])
             + mp.quad(lambda x: (mp.exp(x) - 1) * C * mp.exp(G * x) * abs(x) ** (-Y - 1), [-mp.inf, -1]))
show("b direct integral base sigma=0", b_direct)

show("gauss [-8,8]", mp.sqrt(mp.pi) * mp.erf(8))

for sigma in [mp.mpf(0), mp.mpf("0.1")]:
    for t in ["0.05", "0.1", "0.2"]:
        show(f"atm call sigma={sigma} t={t}", atm_call_lewis(mp.mpf(t), C, G, M, Y, sigma))

# asymmetric stable positive probability, Y = 1.5, C+ = 1, C- = 2
theta = mp.mpf(-1) / 3
show("P(Z>=0) Y=1.5 C+=1 C-=2", mp.mpf(1) / 2 + mp.atan(theta * mp.tan(mp.pi * Y / 2)) / (mp.pi * Y))
