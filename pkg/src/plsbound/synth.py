"""Synthetic regression problems with a prescribed covariance spectrum.

A scenario lists blocks of eigenvalues, either an equally spaced grid or
draws from a normal cluster. The covariance is ``Q^T diag(lambda) Q`` with a
Haar-random rotation ``Q``; regressors are Gaussian with that covariance,
coefficients are uniform on [0, 1] and the noise standard deviation is 10%
of the signal's.

Two designs are available for the regressor matrix:

``gaussian``
    rows are independent ``N(0, Sigma)`` draws. The spectrum of ``X^T X / N``
    then fluctuates around ``lambda`` (relative spread ~ sqrt(D / N)).
``exact``
    ``X = sqrt(N) U Sigma^{1/2}`` with ``U`` the orthonormalized, centered
    Gaussian matrix, so ``X^T X / N == Sigma`` and the Gram spectrum is
    exactly the scenario's.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from numpy.typing import NDArray

from .errors import ResampleExhaustedError
from .model import Dataset
from .numerics import orthonormal_columns, qr_orthonormal, sym_eig

POSITIVITY_FLOOR = 1e-3
MAX_RESAMPLE = 1000
NOISE_FRACTION = 0.1

Design = Literal["gaussian", "exact"]


@dataclass(frozen=True)
class EquallySpaced:
    lo: float
    hi: float


@dataclass(frozen=True)
class NormalCluster:
    mean: float
    sd: float


Source = Union[EquallySpaced, NormalCluster]


@dataclass(frozen=True)
class Scenario:
    id: int
    blocks: tuple[tuple[int, Source], ...]
    name: str = ""

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("scenario needs at least one block")
        for count, src in self.blocks:
            if count < 1:
                raise ValueError("block counts must be positive")
            if isinstance(src, NormalCluster) and src.sd < 0:
                raise ValueError("cluster sd must be non-negative")
            if isinstance(src, EquallySpaced) and (src.lo <= 0 or src.hi <= 0):
                raise ValueError("equally spaced eigenvalues must be positive")

    @property
    def d_total(self) -> int:
        return sum(count for count, _ in self.blocks)

    @property
    def n_clusters(self) -> int:
        return sum(1 for _, src in self.blocks if isinstance(src, NormalCluster))


SCENARIOS: dict[int, Scenario] = {
    1: Scenario(1, ((30, EquallySpaced(2.5, 7.5)),), "equally spaced 2.5..7.5"),
    2: Scenario(2, ((30, NormalCluster(5.0, 0.1)),), "one cluster"),
    3: Scenario(3, ((15, NormalCluster(2.5, 0.1)), (15, NormalCluster(7.5, 0.1))), "two clusters"),
    4: Scenario(
        4,
        ((10, NormalCluster(2.5, 0.1)), (10, NormalCluster(5.0, 0.1)), (10, NormalCluster(7.5, 0.1))),
        "three clusters",
    ),
    5: Scenario(
        5,
        ((10, NormalCluster(0.2, 0.1)), (10, NormalCluster(5.0, 0.1)), (10, NormalCluster(7.5, 0.1))),
        "three clusters, one near zero",
    ),
}


_BLOCK_RE = re.compile(r"^\s*(\d+)\s+(spaced|normal)\s+(\S+)\s+(\S+)\s*$")


def parse_scenario(text: str) -> Scenario:
    """Read a scenario from ``key = value`` lines.

    Recognized keys are ``id``, ``name`` and any number of ``block`` lines of
    the form ``<count> spaced <lo> <hi>`` or ``<count> normal <mean> <sd>``.
    ``#`` starts a comment.

    >>> parse_scenario("id = 7\\nblock = 20 normal 1 0.1\\nblock = 10 spaced 3 4").d_total
    30
    """
    sid, name, blocks = None, "", []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "id":
            sid = int(value)
        elif key == "name":
            name = value
        elif key == "block":
            m = _BLOCK_RE.match(value)
            if not m:
                raise ValueError(f"line {lineno}: bad block spec {value!r}")
            count, kind, p1, p2 = int(m[1]), m[2], float(m[3]), float(m[4])
            src = EquallySpaced(p1, p2) if kind == "spaced" else NormalCluster(p1, p2)
            blocks.append((count, src))
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if sid is None:
        raise ValueError("scenario config needs an 'id'")
    return Scenario(sid, tuple(blocks), name)


def get_scenario(ref: int | str | Scenario) -> Scenario:
    if isinstance(ref, Scenario):
        return ref
    try:
        return SCENARIOS[int(ref)]
    except (KeyError, ValueError):
        raise ValueError(f"unknown scenario {ref!r}; built-in ids are {sorted(SCENARIOS)}") from None


def sample_eigenvalues(sc: Scenario, rng: np.random.Generator) -> NDArray[np.float64]:
    """Draw the scenario's eigenvalues in block order.

    Normal-cluster draws at or below 1e-3 are redrawn so the covariance stays
    positive definite.
    """
    out = []
    for count, src in sc.blocks:
        if isinstance(src, EquallySpaced):
            out.append(np.linspace(src.lo, src.hi, count))
            continue
        vals = rng.normal(src.mean, src.sd, count)
        for _ in range(MAX_RESAMPLE):
            bad = vals <= POSITIVITY_FLOOR
            if not bad.any():
                break
            vals[bad] = rng.normal(src.mean, src.sd, int(bad.sum()))
        else:
            raise ResampleExhaustedError(
                f"could not draw positive eigenvalues from N({src.mean}, {src.sd})"
            )
        out.append(vals)
    return np.concatenate(out)


def covariance_from_eigenvalues(lambdas: NDArray[np.float64], rng: np.random.Generator) -> NDArray[np.float64]:
    """``Q^T diag(lambdas) Q`` with ``Q`` Haar distributed."""
    lam = np.asarray(lambdas, dtype=np.float64)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    d = lam.shape[0]
    q = qr_orthonormal(rng.standard_normal((d, d)))
    sigma = (q.T * lam) @ q
    return 0.5 * (sigma + sigma.T)


def _sqrtm_spd(sigma: NDArray[np.float64]) -> NDArray[np.float64]:
    eig = sym_eig(sigma)
    v = eig.eigenvectors
    root = (v * np.sqrt(np.clip(eig.eigenvalues, 0.0, None))) @ v.T
    return 0.5 * (root + root.T)


@dataclass(frozen=True)
class SyntheticProblem:
    dataset: Dataset
    true_beta: NDArray[np.float64]
    sigma_noise: float
    realized_eigenvalues: NDArray[np.float64]
    seed: int
    scenario_id: int
    design: str
    covariance: NDArray[np.float64] = field(repr=False)


def generate_problem(
    sc: Scenario | int, n: int = 1000, seed: int = 0, *, design: Design = "gaussian"
) -> SyntheticProblem:
    """Draw one regression problem; identical arguments give identical output.

    Random draws happen in a fixed order from ``numpy.random.default_rng(seed)``:
    eigenvalues, rotation, regressors, coefficients, noise.
    """
    sc = get_scenario(sc)
    d = sc.d_total
    if n < d + 1:
        raise ValueError(f"need n >= D + 1 = {d + 1}, got {n}")
    rng = np.random.default_rng(seed)
    lam = sample_eigenvalues(sc, rng)
    sigma = covariance_from_eigenvalues(lam, rng)
    root = _sqrtm_spd(sigma)
    z = rng.standard_normal((n, d))
    if design == "gaussian":
        x = z @ root
    elif design == "exact":
        u = orthonormal_columns(z - z.mean(axis=0))
        x = np.sqrt(n) * (u @ root)
    else:
        raise ValueError(f"unknown design {design!r}")
    beta = rng.uniform(0.0, 1.0, d)
    signal = x @ beta
    sigma_noise = NOISE_FRACTION * float(np.std(signal))
    y = signal + rng.normal(0.0, sigma_noise, n)
    dataset = Dataset.from_arrays(x, y, center=True)
    return SyntheticProblem(
        dataset=dataset,
        true_beta=beta,
        sigma_noise=sigma_noise,
        realized_eigenvalues=np.sort(lam)[::-1].copy(),
        seed=seed,
        scenario_id=sc.id,
        design=design,
        covariance=sigma,
    )
