import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fdnoma import model
from fdnoma.model import ChannelRealization, SystemParams

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def draw(trial, seed=7, **overrides):
    p = SystemParams().replace(**overrides) if overrides else SystemParams()
    return p, model.sample_channels(p, model.trial_rng(seed, trial))


def explicit_channel(d):
    """ChannelRealization from FD vectors only; extended vectors pad with zeros."""
    nt, nr = d["f2"].shape[0], d["h2"].shape[0]

    def ext(x, n):
        return np.concatenate([x, np.zeros(n, dtype=complex)])

    return ChannelRealization(
        h1=d["h1"], h2=d["h2"], f1=d["f1"], f2=d["f2"], H_RR=d["H_RR"], h_BP=d["h_BP"],
        h_RP=d["h_RP"], h_PR=d["h_PR"], ext_h2=ext(d["h2"], nt), ext_f1=ext(d["f1"], nr),
        ext_f2=ext(d["f2"], nr), ext_h_RP=ext(d["h_RP"], nr), ext_h_PR=ext(d["h_PR"], nt))


def random_pd(rng, n, cond=1e3):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(G)
    lam = np.geomspace(1.0, 1.0 / cond, n)
    return (Q * lam) @ Q.conj().T


def random_unit(rng, n, size=None):
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


@pytest.fixture
def params():
    return SystemParams()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
