"""Named scenarios covering the simulation grid.

Names look like ``table1-n0-cor0`` or ``table2-t05-cor075``:

* ``table1`` has no outliers; ``table2`` and ``table3`` (the AUC view of the
  same data) have 10% outliers.
* the family is ``n``, ``ln``, ``t`` or ``w``; the suffix ``0`` means one mode
  at 0 and ``05`` two equal modes at 0 and 5.
* ``cor`` is 0, 0.5 (``05``) or 0.75 (``075``).

``table2-mixed05`` draws family and correlation per mode for every
replicate, and ``random`` draws the whole scenario.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from bpeel.errors import UnknownPreset
from bpeel.synth import (
    Distribution,
    ModeSpec,
    ScenarioConfig,
    random_scenario,
    split_evenly,
)

N_ROWS = 50
P_DIM = 100
OUTLIER_FRACTION = 0.10
MODE_SHIFT = 5.0

_FAMILIES = {
    "n": Distribution.NORMAL,
    "ln": Distribution.LOGNORMAL,
    "t": Distribution.STUDENT_T,
    "w": Distribution.WISHART,
}
_CORRELATIONS = {"0": 0.0, "05": 0.5, "075": 0.75}
_MIXED_RHOS = (0.0, 0.5, 0.75)


def outlier_range_for(modes) -> float:
    # lognormal data get the wider outlier box
    return 20.0 if any(m.distribution is Distribution.LOGNORMAL for m in modes) else 10.0


@dataclass(frozen=True)
class Preset:
    """A scenario source: either a fixed config or one drawn per replicate."""

    name: str
    build: Callable[[np.random.Generator], ScenarioConfig]
    randomized: bool = False

    def config(self, rng: np.random.Generator) -> ScenarioConfig:
        return self.build(rng)


def _grid_config(
    table: int, family: str, bimodal: bool, rho: float, name: str, p: int = P_DIM
) -> ScenarioConfig:
    outliers = 0 if table == 1 else int(round(OUTLIER_FRACTION * N_ROWS))
    counts = split_evenly(N_ROWS - outliers, 2 if bimodal else 1)
    modes = tuple(
        ModeSpec(_FAMILIES[family], count, MODE_SHIFT * k, rho) for k, count in enumerate(counts)
    )
    return ScenarioConfig(
        modes=modes,
        p=p,
        outlier_count=outliers,
        outlier_range=outlier_range_for(modes),
        name=name,
        contamination="none" if outliers == 0 else "10%",
    )


def _mixed(rng: np.random.Generator, name: str) -> ScenarioConfig:
    outliers = int(round(OUTLIER_FRACTION * N_ROWS))
    families = list(Distribution)
    modes = tuple(
        ModeSpec(
            families[int(rng.integers(0, len(families)))],
            count,
            MODE_SHIFT * k,
            _MIXED_RHOS[int(rng.integers(0, len(_MIXED_RHOS)))],
        )
        for k, count in enumerate(split_evenly(N_ROWS - outliers, 2))
    )
    return ScenarioConfig(
        modes=modes,
        p=P_DIM,
        outlier_count=outliers,
        outlier_range=outlier_range_for(modes),
        name=name,
        contamination="10%",
    )


def _build_registry() -> dict[str, Preset]:
    registry: dict[str, Preset] = {}
    for table in (1, 2, 3):
        for fam in _FAMILIES:
            for modes in ("0", "05"):
                for cor_key, rho in _CORRELATIONS.items():
                    name = f"table{table}-{fam}{modes}-cor{cor_key}"
                    cfg = _grid_config(table, fam, modes == "05", rho, name)
                    registry[name] = Preset(name, lambda rng, cfg=cfg: cfg)
    for table in (2, 3):
        name = f"table{table}-mixed05"
        registry[name] = Preset(name, lambda rng, name=name: _mixed(rng, name), randomized=True)
    registry["random"] = Preset("random", lambda rng: random_scenario(rng), randomized=True)
    return registry


PRESETS = _build_registry()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise UnknownPreset(
            f"unknown scenario preset {name!r}; see `bpeel simulate --list-presets`"
        ) from None


def preset_names() -> list[str]:
    return sorted(PRESETS)
