"""Synthetic scenarios: equicorrelated modes from four families plus uniform outliers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from bpeel.dataset import LabeledDataset, validate
from bpeel.errors import InvalidRho, InvalidSpec

T_DF = 5
RHO_CAP = 0.999


class Distribution(str, enum.Enum):
    NORMAL = "normal"
    STUDENT_T = "t"
    LOGNORMAL = "lognormal"
    WISHART = "wishart"

    @classmethod
    def parse(cls, name: str) -> Distribution:
        key = name.strip().lower()
        aliases = {"n": "normal", "ln": "lognormal", "w": "wishart", "student_t": "t"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InvalidSpec(f"unknown distribution {name!r}") from None


@dataclass(frozen=True)
class ModeSpec:
    """One mode of inliers.

    ``mean`` is either a scalar (broadcast to every coordinate) or a
    length-p vector.
    """

    distribution: Distribution
    count: int
    mean: float | tuple[float, ...] = 0.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.distribution, str) and not isinstance(self.distribution, Distribution):
            object.__setattr__(self, "distribution", Distribution.parse(self.distribution))
        if not isinstance(self.mean, (int, float)):
            object.__setattr__(self, "mean", tuple(float(m) for m in self.mean))
        if self.count < 0:
            raise InvalidSpec(f"mode count must be non-negative, got {self.count}")
        if not 0 <= self.rho <= RHO_CAP:
            raise InvalidRho(f"rho must lie in [0, {RHO_CAP}], got {self.rho}")

    def mean_vector(self, p: int) -> np.ndarray:
        if isinstance(self.mean, tuple):
            if len(self.mean) != p:
                raise InvalidSpec(f"mean has length {len(self.mean)}, expected {p}")
            return np.asarray(self.mean)
        return np.full(p, float(self.mean))


@dataclass(frozen=True)
class ScenarioConfig:
    modes: tuple[ModeSpec, ...]
    p: int
    outlier_count: int = 0
    outlier_range: float = 10.0
    seed: int = 0
    name: str = ""
    contamination: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.p < 1:
            raise InvalidSpec(f"p must be positive, got {self.p}")
        if not self.modes:
            raise InvalidSpec("a scenario needs at least one mode")
        if self.outlier_count < 0:
            raise InvalidSpec(f"outlier_count must be non-negative, got {self.outlier_count}")
        if not self.outlier_range > 0:
            raise InvalidSpec(f"outlier_range must be positive, got {self.outlier_range}")
        if self.n < 1:
            raise InvalidSpec("scenario has no rows")

    @property
    def n(self) -> int:
        return sum(m.count for m in self.modes) + self.outlier_count


def chol_equicorr(p: int, rho: float) -> np.ndarray:
    """Lower Cholesky factor of ``(1 - rho) I + rho J``."""
    if not 0 <= rho < 1:
        raise InvalidRho(f"rho must lie in [0, 1), got {rho}")
    if p < 1:
        raise InvalidSpec(f"p must be positive, got {p}")
    if rho == 0:
        return np.eye(p)
    sigma = np.full((p, p), rho)
    np.fill_diagonal(sigma, 1.0)
    return np.linalg.cholesky(sigma)


def correlated_normal(count: int, L: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, L.shape[0]))
    return z @ L.T


def student_t_rows(gauss: np.ndarray, w: np.ndarray, df: int = T_DF) -> np.ndarray:
    """Turn correlated normal rows into multivariate t rows, ``x / sqrt(w / df)``."""
    return gauss / np.sqrt(np.asarray(w, dtype=np.float64) / df)[:, None]


def wishart_diagonals(count: int, L: np.ndarray, df: int, rng: np.random.Generator) -> np.ndarray:
    """Diagonals of ``count`` Wishart(L L', df) draws, Bartlett construction.

    ``W = (L A)(L A)'`` with ``A`` lower triangular, ``A_kk ~ sqrt(chi2(df - k))``
    and standard normal entries below the diagonal.
    """
    p = L.shape[0]
    if df < p:
        raise InvalidSpec(f"Bartlett construction needs df >= p, got df={df}, p={p}")
    lower = np.tril_indices(p, -1)
    out = np.empty((count, p))
    dofs = df - np.arange(p)
    for i in range(count):
        A = np.zeros((p, p))
        A[np.diag_indices(p)] = np.sqrt(rng.chisquare(dofs))
        A[lower] = rng.standard_normal(lower[0].size)
        LA = L @ A
        out[i] = np.einsum("ij,ij->i", LA, LA)
    return out


def sample_mode(spec: ModeSpec, p: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``spec.count`` rows of one mode."""
    mu = spec.mean_vector(p)
    if spec.count == 0:
        return np.empty((0, p))
    L = chol_equicorr(p, spec.rho)
    dist = spec.distribution
    if dist is Distribution.NORMAL:
        return mu + correlated_normal(spec.count, L, rng)
    if dist is Distribution.STUDENT_T:
        gauss = correlated_normal(spec.count, L, rng)
        return mu + student_t_rows(gauss, rng.chisquare(T_DF, size=spec.count))
    if dist is Distribution.LOGNORMAL:
        return np.exp(mu + correlated_normal(spec.count, L, rng))
    if dist is Distribution.WISHART:
        return mu + wishart_diagonals(spec.count, L, p, rng) / p
    raise InvalidSpec(f"unsupported distribution {dist!r}")


def inject_outliers(config: ScenarioConfig, rng: np.random.Generator) -> LabeledDataset:
    """Generate all modes, append uniform outliers and shuffle the rows."""
    p = config.p
    blocks = [sample_mode(m, p, rng) for m in config.modes]
    r = config.outlier_range
    blocks.append(rng.uniform(-r, r, size=(config.outlier_count, p)))
    values = np.vstack(blocks)
    labels = np.zeros(values.shape[0], dtype=bool)
    labels[values.shape[0] - config.outlier_count :] = True
    order = rng.permutation(values.shape[0])
    return LabeledDataset(validate(values[order]), labels[order], name=config.name)


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), replicate]))


def generate(config: ScenarioConfig, replicate: int = 0) -> LabeledDataset:
    """Dataset for one replicate; depends only on ``(config.seed, replicate)``."""
    return inject_outliers(config, replicate_rng(config.seed, replicate))


def split_evenly(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


CONTAMINATION_LEVELS = ("none", "1-10", "10-20")


def random_scenario(rng: np.random.Generator, seed: int = 0) -> ScenarioConfig:
    """Draw a scenario from the fully randomized protocol.

    n in [50, 150], p in [50, 300], 1 to 5 modes of near-equal size, each
    with a random family and a correlation uniform on [0, 1) (capped), mode
    ``k`` centred at ``5 * k``; contamination is none, 1-10% or 10-20% with
    outliers uniform on [-20, 20].
    """
    n = int(rng.integers(50, 151))
    p = int(rng.integers(50, 301))
    n_modes = int(rng.integers(1, 6))
    level = CONTAMINATION_LEVELS[int(rng.integers(0, 3))]
    if level == "none":
        frac = 0.0
    elif level == "1-10":
        frac = rng.uniform(0.01, 0.10)
    else:
        frac = rng.uniform(0.10, 0.20)
    outliers = int(round(frac * n))
    if level != "none":
        outliers = max(outliers, 1)
    families = list(Distribution)
    modes = []
    for k, count in enumerate(split_evenly(n - outliers, n_modes)):
        modes.append(
            ModeSpec(
                distribution=families[int(rng.integers(0, len(families)))],
                count=count,
                mean=5.0 * k,
                rho=min(float(rng.uniform(0.0, 1.0)), RHO_CAP),
            )
        )
    return ScenarioConfig(
        modes=tuple(modes),
        p=p,
        outlier_count=outliers,
        outlier_range=20.0,
        seed=seed,
        name=f"random:{level}",
        contamination=level,
    )


def config_from_dict(raw: dict) -> ScenarioConfig:
    """Build a scenario from its JSON form (see README for the schema)."""
    try:
        modes = tuple(
            ModeSpec(
                distribution=Distribution.parse(m["distribution"]),
                count=int(m["count"]),
                mean=m.get("mean", 0.0),
                rho=float(m.get("rho", 0.0)),
            )
            for m in raw["modes"]
        )
        return ScenarioConfig(
            modes=modes,
            p=int(raw["p"]),
            outlier_count=int(raw.get("outlier_count", 0)),
            outlier_range=float(raw.get("outlier_range", 10.0)),
            seed=int(raw.get("seed", 0)),
            name=str(raw.get("name", "custom")),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidSpec(f"malformed scenario config: {exc}") from None


def config_to_dict(config: ScenarioConfig) -> dict:
    return {
        "name": config.name,
        "p": config.p,
        "outlier_count": config.outlier_count,
        "outlier_range": config.outlier_range,
        "seed": config.seed,
        "modes": [
            {
                "distribution": m.distribution.value,
                "count": m.count,
                "mean": list(m.mean) if isinstance(m.mean, tuple) else m.mean,
                "rho": m.rho,
            }
            for m in config.modes
        ],
    }
