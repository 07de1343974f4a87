"""Independent recomputation of the constants frozen into the test suite.

Nothing here imports the package.  Scalar formulas are re-evaluated in
50-digit arithmetic with mpmath; the SDP reference value comes from a
zooming brute-force grid over the Cholesky-factor parameterisation of
the 2x2 Hermitian PSD cone.  Run it and paste the printed values into
tests/frozen.py.
"""

import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def dbw(x):
    return mp.mpf(10) ** (mp.mpf(x) / 10)


DEFAULTS = dict(a1=mp.mpf("0.05"), a2=mp.mpf("0.95"), beta_BP=mp.mpf("0.5"), beta_RP=mp.mpf("0.5"),
                beta_h1=mp.mpf(1), beta_h2=mp.mpf("0.5"), beta_f1=mp.mpf(1), beta_f2=mp.mpf("0.5"),
                beta_PR=mp.mpf("0.5"), sigma2_1=dbw(1), sigma2_R=dbw(1), sigma2_2=dbw(1),
                P_U=dbw(10), I_th=dbw(15))


def scalar_sinr_example():
    p = DEFAULTS
    h1sq, f1g, Ps, Pr = mp.mpf(1), mp.mpf("0.01"), mp.mpf(10), mp.mpf(5)
    s = p["beta_h1"] * Ps * h1sq
    den = s * p["a1"] + p["beta_f1"] * Pr * f1g + p["sigma2_1"]
    g12 = s * p["a2"] / den
    g1 = s * p["a1"] / (p["beta_f1"] * Pr * f1g + p["sigma2_1"])
    return g12, g1


# explicit channel used for the vector-formula checks (Nt = Nr = 2)
CH = dict(
    h1=mp.mpc("0.8", "-0.6"),
    h2=[mp.mpc("1.1", "0.3"), mp.mpc("-0.4", "0.9")],
    f1=[mp.mpc("0.05", "-0.08"), mp.mpc("0.11", "0.02")],
    f2=[mp.mpc("0.7", "-1.2"), mp.mpc("0.3", "0.5")],
    H_RR=[[mp.mpc("0.02", "0.01"), mp.mpc("-0.03", "0.04")],
          [mp.mpc("0.01", "-0.02"), mp.mpc("0.05", "0.0")]],
    h_BP=mp.mpc("0.9", "0.4"),
    h_RP=[mp.mpc("-0.5", "0.2"), mp.mpc("0.6", "0.7")],
    h_PR=[mp.mpc("0.3", "-0.3"), mp.mpc("1.0", "0.2")],
)
WT = [mp.mpc("0.6", "0"), mp.mpc("0.0", "0.8")]
WR = [mp.mpc("0.28", "0.96") / mp.sqrt(2), mp.mpc("1", "0") / mp.sqrt(2)]
PS, PR = mp.mpf("7.5"), mp.mpf("2.25")


def dot(a, b):  # a^T b (no conjugation)
    return sum(x * y for x, y in zip(a, b))


def vdot(a, b):  # a^H b
    return sum(mp.conj(x) * y for x, y in zip(a, b))


def vector_example():
    p, c = DEFAULTS, CH
    a2 = lambda z: abs(z) ** 2
    f1g = a2(dot(c["f1"], WT))
    s1 = p["beta_h1"] * PS * a2(c["h1"])
    g12 = s1 * p["a2"] / (s1 * p["a1"] + p["beta_f1"] * PR * f1g + p["sigma2_1"])
    g1 = s1 * p["a1"] / (p["beta_f1"] * PR * f1g + p["sigma2_1"])
    si = [dot(row, WT) for row in c["H_RR"]]
    sR = p["beta_h2"] * PS * a2(vdot(WR, c["h2"]))
    gR = sR * p["a2"] / (sR * p["a1"] + PR * a2(vdot(WR, si))
                         + p["beta_PR"] * p["P_U"] * a2(vdot(WR, c["h_PR"])) + p["sigma2_R"])
    gR2 = p["beta_f2"] * PR * a2(dot(c["f2"], WT)) / p["sigma2_2"]
    intf = p["beta_BP"] * PS * a2(c["h_BP"]) + p["beta_RP"] * PR * a2(dot(c["h_RP"], WT))
    near = mp.log(1 + g1, 2)
    far = mp.log(1 + min(g12, gR, gR2), 2)
    # smallest BS power meeting the far target with these beamformers (r~ = 1)
    rt = mp.mpf(1)
    scale = p["a2"] / rt - p["a1"]
    cu1 = (PR * p["beta_f1"] * f1g + p["sigma2_1"]) / (p["beta_h1"] * a2(c["h1"]) * scale)
    mu1 = p["beta_PR"] * p["P_U"] * a2(vdot(WR, c["h_PR"])) + p["sigma2_R"]
    relay = (PR * a2(vdot(WR, si)) + mu1) / (p["beta_h2"] * a2(vdot(WR, c["h2"])) * scale)
    return dict(gamma_12=g12, gamma_1=g1, gamma_R=gR, gamma_R2=gR2, interference=intf,
                near=near, far=far, vtilde=max(cu1, relay))


# n = 2 SDP with four trace constraints
SDP_C = np.array([[1.0, 0.3 - 0.2j], [0.3 + 0.2j, 0.5]])
_f = np.array([1 + 0.5j, -0.7 + 0.2j])
_h = np.array([0.4 - 0.3j, 0.9 + 0.1j])
SDP_CONS = [
    (np.eye(2, dtype=complex), "<=", 10.0),
    (np.outer(_f.conj(), _f), ">=", 2.0),
    (np.array([[0.2, 0.1j], [-0.1j, -0.3]]), "<=", 0.5),
    (np.outer(_h.conj(), _h), "<=", 1.5),
]


def sdp_brute_force(levels=8, n=41):
    """min tr(CX) over X = L L^H, L = [[a, 0], [b + ic, d]], by zooming grids."""
    lo = np.array([0.0, -3.2, -3.2, 0.0])
    hi = np.array([3.2, 3.2, 3.2, 3.2])
    best = None
    for _ in range(levels):
        axes = [np.linspace(l, h, n) for l, h in zip(lo, hi)]
        a, b, c, d = np.meshgrid(*axes, indexing="ij")
        x11 = a * a
        x12 = a * (b - 1j * c)
        x22 = b * b + c * c + d * d

        def tr(M):
            return (M[0, 0] * x11 + M[1, 1] * x22 + 2 * np.real(M[1, 0] * x12)).real

        ok = np.ones(a.shape, dtype=bool)
        for A, sense, bnd in SDP_CONS:
            v = tr(A)
            ok &= (v <= bnd) if sense == "<=" else (v >= bnd)
        obj = np.where(ok, tr(SDP_C), np.inf)
        k = np.unravel_index(np.argmin(obj), obj.shape)
        val = obj[k]
        if best is None or val < best[0]:
            best = (val, np.array([axes[i][k[i]] for i in range(4)]))
        width = (hi - lo) / (n - 1) * 4
        lo = np.maximum(best[1] - width, [0.0, -np.inf, -np.inf, 0.0])
        hi = best[1] + width
    return best


if __name__ == "__main__":
    g12, g1 = scalar_sinr_example()
    print("SCALAR_GAMMA_12 =", mp.nstr(g12, 17))
    print("SCALAR_GAMMA_1 =", mp.nstr(g1, 17))
    for k, v in vector_example().items():
        print(f"VEC_{k.upper()} =", mp.nstr(v, 17))
    val, x = sdp_brute_force()
    print("SDP_BRUTE_OBJECTIVE =", repr(float(val)), "at", x)
