"""Scenario parameters, unit conversion and seeded channel generation."""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemParams", "ChannelRealization", "ConfigError",
    "dbw_to_watt", "watt_to_dbw", "trial_rng", "sample_channels",
    "parse_config_text", "load_config_file", "params_from_mapping",
]


class ConfigError(ValueError):
    pass


def dbw_to_watt(x):
    out = 10.0 ** (np.asarray(x, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def watt_to_dbw(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SystemParams:
    """All scalar quantities of one scenario, in linear units (watts).

    The defaults reproduce the simulation setup used for the rate-region
    figures: unit-ish noise (1 dBW), a 10 dBW primary transmitter, NOMA
    split 0.05/0.95, 0.5 path loss on the BS-primary, relay-primary,
    BS-relay and relay-far-user links, and I_th = 15 dBW.
    """
    Nt: int = 2
    Nr: int = 2
    a1: float = 0.05
    a2: float = 0.95
    beta_BP: float = 0.5
    beta_RP: float = 0.5
    beta_h1: float = 1.0
    beta_h2: float = 0.5
    beta_f1: float = 1.0
    beta_f2: float = 0.5
    beta_PR: float = 0.5
    sigma2_1: float = field(default_factory=lambda: dbw_to_watt(1.0))
    sigma2_R: float = field(default_factory=lambda: dbw_to_watt(1.0))
    sigma2_2: float = field(default_factory=lambda: dbw_to_watt(1.0))
    P_U: float = field(default_factory=lambda: dbw_to_watt(10.0))
    I_th: float = field(default_factory=lambda: dbw_to_watt(15.0))
    sigma2_RR: float = field(default_factory=lambda: dbw_to_watt(-30.0))
    k1: float = 0.01

    def __post_init__(self):
        if int(self.Nt) != self.Nt or int(self.Nr) != self.Nr or self.Nt < 1 or self.Nr < 1:
            raise ConfigError(f"antenna counts must be positive integers, got Nt={self.Nt}, Nr={self.Nr}")
        if abs(self.a1 + self.a2 - 1.0) > 1e-12:
            raise ConfigError(f"a1 + a2 must equal 1, got {self.a1 + self.a2!r}")
        if not 0.0 < self.a1 < self.a2:
            raise ConfigError(f"need 0 < a1 < a2, got a1={self.a1}, a2={self.a2}")
        for f in dataclasses.fields(self):
            if f.name in ("Nt", "Nr"):
                continue
            v = getattr(self, f.name)
            if not np.isfinite(v) or v < 0:
                raise ConfigError(f"{f.name} must be finite and non-negative, got {v!r}")
        for name in ("sigma2_1", "sigma2_R", "sigma2_2"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of every channel in the network.

    Path loss is *not* folded in; every SINR expression applies the beta
    factors explicitly.  The ``ext_*`` vectors have length ``Nr + Nt`` and
    serve the half-duplex baseline, whose relay uses all of its antennas in
    each phase.  Their leading entries are the full-duplex channels.
    """
    h1: complex
    h2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    H_RR: np.ndarray
    h_BP: complex
    h_RP: np.ndarray
    h_PR: np.ndarray
    ext_h2: np.ndarray
    ext_f1: np.ndarray
    ext_f2: np.ndarray
    ext_h_RP: np.ndarray
    ext_h_PR: np.ndarray

    @property
    def Nt(self):
        return self.f2.shape[0]

    @property
    def Nr(self):
        return self.h2.shape[0]

    def arrays(self):
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        a, b = self.arrays(), other.arrays()
        return all(np.array_equal(a[k], b[k]) for k in a)


def trial_rng(seed, trial):
    """Independent, counter-based random stream for one Monte Carlo trial.

    The stream depends only on ``(seed, trial)``, so results do not depend
    on how trials are scheduled across workers.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def _cn(rng, shape):
    # unit-variance circularly-symmetric complex Gaussian
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channels(p, rng):
    """Draw one :class:`ChannelRealization`.

    The amount of randomness consumed is independent of the variances in
    ``p`` (zero-variance channels are drawn and then scaled), so changing
    e.g. ``sigma2_RR`` leaves every other channel bit-identical.
    """
    Nt, Nr = int(p.Nt), int(p.Nr)
    Ne = Nt + Nr
    h1 = complex(_cn(rng, ()))
    h_BP = complex(_cn(rng, ()))
    ext_h2 = _cn(rng, Ne)
    ext_f1 = _cn(rng, Ne) * np.sqrt(p.k1)
    ext_f2 = _cn(rng, Ne)
    ext_h_RP = _cn(rng, Ne)
    ext_h_PR = _cn(rng, Ne)
    H_RR = _cn(rng, (Nr, Nt)) * np.sqrt(p.sigma2_RR)
    return ChannelRealization(
        h1=h1, h2=ext_h2[:Nr].copy(), f1=ext_f1[:Nt].copy(), f2=ext_f2[:Nt].copy(),
        H_RR=H_RR, h_BP=h_BP, h_RP=ext_h_RP[:Nt].copy(), h_PR=ext_h_PR[:Nr].copy(),
        ext_h2=ext_h2, ext_f1=ext_f1, ext_f2=ext_f2, ext_h_RP=ext_h_RP, ext_h_PR=ext_h_PR,
    )


# ---------------------------------------------------------------------------
# flat "key = value" configuration files
# ---------------------------------------------------------------------------

def parse_config_text(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SystemParams)}


def params_from_mapping(mapping, base=None):
    """Build :class:`SystemParams` from string values.

    A key may carry a ``_dBW`` suffix (e.g. ``I_th_dBW = 15``), in which
    case the value is converted to watts.  Keys that are not parameter
    names are returned untouched in the second element of the result.
    """
    base = base or SystemParams()
    changes, rest = {}, {}
    for key, value in mapping.items():
        name, convert = key, False
        if key.endswith("_dBW"):
            name, convert = key[:-4], True
        if name not in _PARAM_FIELDS:
            rest[key] = value
            continue
        if name in changes:
            raise ConfigError(f"{name} given twice (watts and dBW?)")
        try:
            if name in ("Nt", "Nr"):
                if convert:
                    raise ConfigError(f"{name} has no dBW form")
                changes[name] = int(value)
            else:
                v = float(value)
                changes[name] = dbw_to_watt(v) if convert else v
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    if "a1" in changes and "a2" not in changes:
        changes["a2"] = 1.0 - changes["a1"]
    return base.replace(**changes), rest
