"""Reference values produced by tools/derive_frozen_values.py (independent of the package)."""

import numpy as np

# default parameters, |h1|^2 = 1, |f1^T wt|^2 = 0.01, Ps = 10, Pr = 5
SCALAR_GAMMA_12 = 5.251736715101761
SCALAR_GAMMA_1 = 0.38199273655680743

# explicit Nt = Nr = 2 channel, beamformers and powers
CH = dict(
    h1=0.8 - 0.6j,
    h2=np.array([1.1 + 0.3j, -0.4 + 0.9j]),
    f1=np.array([0.05 - 0.08j, 0.11 + 0.02j]),
    f2=np.array([0.7 - 1.2j, 0.3 + 0.5j]),
    H_RR=np.array([[0.02 + 0.01j, -0.03 + 0.04j], [0.01 - 0.02j, 0.05 + 0.0j]]),
    h_BP=0.9 + 0.4j,
    h_RP=np.array([-0.5 + 0.2j, 0.6 + 0.7j]),
    h_PR=np.array([0.3 - 0.3j, 1.0 + 0.2j]),
)
WT = np.array([0.6, 0.8j])
WR = np.array([0.28 + 0.96j, 1.0]) / np.sqrt(2.0)
PS, PR = 7.5, 2.25

VEC_GAMMA_12 = 4.3499060473380167
VEC_GAMMA_1 = 0.29692001030120497
VEC_GAMMA_R = 0.026566421625599622
VEC_GAMMA_R2 = 0.20624732614615969
VEC_INTERFERENCE = 4.87455
VEC_NEAR = 0.37508950171724003
VEC_FAR = 0.037826976739927407
VEC_VTILDE = 297.57855369971123     # r~ = 1, same beamformers, Pr = PR

# n = 2 SDP; optimum from a zooming grid over X = L L^H (grid value is an upper bound)
SDP_C = np.array([[1.0, 0.3 - 0.2j], [0.3 + 0.2j, 0.5]])
_f = np.array([1 + 0.5j, -0.7 + 0.2j])
_h = np.array([0.4 - 0.3j, 0.9 + 0.1j])
SDP_CONS = [
    (np.eye(2, dtype=complex), "<=", 10.0),
    (np.outer(_f.conj(), _f), ">=", 2.0),
    (np.array([[0.2, 0.1j], [-0.1j, -0.3]]), "<=", 0.5),
    (np.outer(_h.conj(), _h), "<=", 1.5),
]
SDP_BRUTE_OBJECTIVE = 0.4265133362380802
