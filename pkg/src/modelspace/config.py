"""Scenario configuration: one JSON document drives every CLI command.

Schema (version 1), all keys optional unless noted:

    {
      "schema": 1,
      "inner": {"tau": <real>, "zeros": [{"re":, "im":, "mult":}]},   # required
      "gamma_set": [[a, b], ...],
      "epsilon": 0.5, "c": 1.0, "p": 2.0, "a": 1, "n0": 1.0,
      "gamma": 0.25,
      "window": 10.0 | [lo, hi],
      "anchor": 0.0,
      "quad": {"window": [lo, hi], "rtol": 1e-9, "limit": 6000},
      "grid": {"nx": 96, "ny": 64},
      "family": {"n_sets": 32, "max_nodes": 8},
      "sweep": {"gammas": [0.5, 0.25, 0.125, 0.0625], "period": 1.0},
      "seed": 42
    }

The randomized suites refuse to run without a seed (determinism is part
of the command contract).
"""

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .inner import InnerFunction
from .sets import MeasurableSet
from .spaces import QuadratureSpec

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    theta: InnerFunction
    gamma_set: MeasurableSet | None
    epsilon: float
    c: float
    p: float
    a: int
    n0: float
    gamma: float | None
    window: tuple
    anchor: float
    quad: QuadratureSpec
    grid: tuple
    family: dict
    sweep: dict
    seed: int
    raw: dict = field(repr=False, default_factory=dict)

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        if d.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema version {d.get('schema')}")
        if "inner" not in d:
            raise ConfigError("config requires an 'inner' block")
        try:
            theta = InnerFunction.from_dict(d["inner"])
        except Exception as e:
            raise ConfigError(f"bad inner-function block: {e}") from e

        eps = float(d.get("epsilon", 0.5))
        if not 0 < eps < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        c = float(d.get("c", 1.0))
        if c <= 0:
            raise ConfigError("c must be positive")
        p = float(d.get("p", 2.0))
        if not p > 1:
            raise ConfigError("p must lie in (1, infinity)")
        a = int(d.get("a", 1))
        if a < 1:
            raise ConfigError("a must be a positive integer")
        n0 = float(d.get("n0", 1.0))
        if n0 < 1:
            raise ConfigError("N0 must be >= 1")
        gamma = d.get("gamma")
        if gamma is not None:
            gamma = float(gamma)
            if not 0 < gamma < 1:
                raise ConfigError("gamma must lie in (0, 1)")

        w = d.get("window", 10.0)
        window = (-float(w), float(w)) if not isinstance(w, (list, tuple)) else (float(w[0]), float(w[1]))
        if not window[0] < window[1]:
            raise ConfigError("window must have positive length")
        anchor = float(d.get("anchor", 0.5 * (window[0] + window[1])))

        gset = None
        if d.get("gamma_set") is not None:
            try:
                gset = MeasurableSet.from_list(d["gamma_set"])
            except Exception as e:
                raise ConfigError(f"bad gamma_set: {e}") from e

        q = d.get("quad", {})
        qwin = q.get("window")
        if qwin is None:
            scale = max(abs(window[0]), abs(window[1]))
            qwin = (-10.0 * scale, 10.0 * scale)
        quad = QuadratureSpec(window=(float(qwin[0]), float(qwin[1])),
                              rtol=float(q.get("rtol", 1e-9)),
                              limit=int(q.get("limit", 6000)))

        g = d.get("grid", {})
        grid = (int(g.get("nx", 96)), int(g.get("ny", 64)))

        seed = d.get("seed")
        if seed is None:
            raise ConfigError("config requires a seed (randomized suites must be reproducible)")

        return ScenarioConfig(
            theta=theta, gamma_set=gset, epsilon=eps, c=c, p=p, a=a, n0=n0,
            gamma=gamma, window=window, anchor=anchor, quad=quad, grid=grid,
            family=dict(d.get("family", {})), sweep=dict(d.get("sweep", {})),
            seed=int(seed), raw=d,
        )

    @staticmethod
    def load(path) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                d = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e
        return ScenarioConfig.from_dict(d)
