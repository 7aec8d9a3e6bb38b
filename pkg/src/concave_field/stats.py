"""Goodness-of-fit checks that return uniform reports."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .models import DomainError

KS_COEF = 1.63  # asymptotic 1% critical value of the Kolmogorov distribution
ALPHA = 0.01
MIN_SAMPLES = 100


@dataclass
class TestReport:
    name: str
    statistic: float
    critical: float
    sample_size: int
    passed: bool
    checks: str = ""
    details: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: statistic={self.statistic:.6g} critical={self.critical:.6g} m={self.sample_size}"

    def to_dict(self):
        return _plain(asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def ks_test_exponential(samples, rate, name="ks-exponential", checks=""):
    x = np.asarray(samples, dtype=float)
    if x.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    if not (rate > 0):
        raise ValueError("rate must be positive")
    if np.any(x <= 0):
        raise DomainError("samples must be positive")
    d = stats.kstest(x, stats.expon(scale=1.0 / rate).cdf).statistic
    crit = KS_COEF / math.sqrt(x.size)
    return TestReport(name, float(d), crit, int(x.size), bool(d < crit), checks)


def two_sample_ks(a, b, name="ks-two-sample", checks=""):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if min(a.size, b.size) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples in each")
    d = stats.ks_2samp(a, b).statistic
    crit = KS_COEF * math.sqrt((a.size + b.size) / (a.size * b.size))
    return TestReport(name, float(d), crit, int(min(a.size, b.size)), bool(d < crit), checks)


def chi_square_cdf(samples, cdf, bins=20, name="chi-square", checks=""):
    """Equal-probability bins under ``cdf``; passes when the p-value exceeds 1%."""
    u = cdf(np.asarray(samples, dtype=float))
    counts = np.histogram(u, bins=bins, range=(0.0, 1.0))[0]
    res = stats.chisquare(counts)
    return TestReport(name, float(res.statistic), ALPHA, int(u.size), bool(res.pvalue > ALPHA), checks,
                      {"p_value": float(res.pvalue)})


def within(name, value, target, tol, relative=True, checks="", sample_size=0):
    err = abs(value - target) / (abs(target) if relative else 1.0)
    return TestReport(name, float(err), float(tol), int(sample_size), bool(err <= tol), checks,
                      {"value": float(value), "target": float(target)})


@dataclass
class RunManifest:
    command: str
    model: str
    n: int
    K: int = None
    lam: float = None
    regime: str = None
    replicas: int = None
    seed: int = 0
    grid: str = None
    output_path: str = None
    version: str = ""
    argv: list = field(default_factory=list)

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(_plain(asdict(self)), fh, indent=2, sort_keys=True)
