"""Experiment configuration: dataclasses, YAML loading, CLI overrides.

Precedence is CLI flag > environment > config file > defaults; the worker
count additionally honors the FUNCGRAPH_WORKERS environment variable.
"""

import dataclasses
from dataclasses import dataclass, field

import yaml

from .mcmc_core import McmcConfig

METHODS = ("fghs", "fglasso-hyper", "fglasso-fixed")
#: Selection levels used when the config does not pin one.
DEFAULT_LEVELS = {"fghs": 0.5, "fglasso-hyper": 0.9, "fglasso-fixed": 0.95}
WORKERS_ENV = "FUNCGRAPH_WORKERS"


@dataclass
class SimulateSpec:
    """Synthetic data source: network truth rendered into noisy curves."""

    network: int = 1
    n_nodes: int = 10
    n_subjects: int = 100
    design: str = "dense"
    noise_sd: float = 0.5
    n_points: int = None  # defaults to 100 dense / 9 sparse

    def __post_init__(self):
        if self.network not in (1, 2):
            raise ValueError("network must be 1 or 2")
        if self.design not in ("dense", "sparse"):
            raise ValueError("design must be dense or sparse")
        if self.n_nodes < 1 or self.n_subjects < 1:
            raise ValueError("node and subject counts must be positive")
        if self.n_points is None:
            self.n_points = 100 if self.design == "dense" else 9


@dataclass
class IngestSpec:
    """File data source."""

    path: str
    rescale_time: bool = False


@dataclass
class ExperimentConfig:
    method: str = "fghs"
    simulate: SimulateSpec = None
    ingest: IngestSpec = None
    var_threshold: float = 0.95
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    level: float = None
    replications: int = 1
    output_dir: str = "funcgraph-out"
    lambda2: float = None
    hyper_s: float = 1.0
    hyper_r: float = 0.01
    diag_rate: float = 1.0
    workers: int = 1
    save_chains: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.simulate is not None and self.ingest is not None:
            raise ValueError("configure either simulate or ingest, not both")
        if self.simulate is None and self.ingest is None:
            self.simulate = SimulateSpec()
        if not 0.0 < self.var_threshold <= 1.0:
            raise ValueError("var_threshold must lie in (0, 1]")
        if self.level is None:
            self.level = DEFAULT_LEVELS[self.method]
        if not 0.0 < self.level < 1.0:
            raise ValueError("selection level must lie in (0, 1)")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.method == "fglasso-fixed" and self.lambda2 is None:
            raise ValueError("fglasso-fixed needs a lambda2 value")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def to_dict(self):
        out = dataclasses.asdict(self)
        return out


def _pop_section(data, name):
    section = data.pop(name, None)
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ValueError(f"config section {name!r} must be a mapping")
    return section


def config_from_dict(data):
    """Build an ExperimentConfig from a nested mapping, rejecting unknown keys."""
    data = dict(data or {})
    kwargs = {}
    source = _pop_section(data, "data")
    if "simulate" in source:
        kwargs["simulate"] = SimulateSpec(**source.pop("simulate"))
    if "ingest" in source:
        kwargs["ingest"] = IngestSpec(**source.pop("ingest"))
    if source:
        raise ValueError(f"unknown data source keys: {sorted(source)}")
    fpca = _pop_section(data, "fpca")
    if "var_threshold" in fpca:
        kwargs["var_threshold"] = fpca.pop("var_threshold")
    if fpca:
        raise ValueError(f"unknown fpca keys: {sorted(fpca)}")
    mcmc = _pop_section(data, "mcmc")
    if mcmc:
        kwargs["mcmc"] = McmcConfig(**mcmc)
    selection = _pop_section(data, "selection")
    if "level" in selection:
        kwargs["level"] = selection.pop("level")
    if selection:
        raise ValueError(f"unknown selection keys: {sorted(selection)}")
    sampler = _pop_section(data, "sampler")
    for key in ("lambda2", "hyper_s", "hyper_r", "diag_rate"):
        if key in sampler:
            kwargs[key] = sampler.pop(key)
    if sampler:
        raise ValueError(f"unknown sampler keys: {sorted(sampler)}")
    for key in ("method", "replications", "output_dir", "workers", "save_chains"):
        if key in data:
            kwargs[key] = data.pop(key)
    if data:
        raise ValueError(f"unknown config keys: {sorted(data)}")
    return ExperimentConfig(**kwargs)


def load_config(path):
    """Load an ExperimentConfig from a YAML file."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return config_from_dict(data)


def apply_overrides(config, **overrides):
    """Return a copy of ``config`` with non-None override values applied.

    MCMC fields (iterations, burn_in, thin, seed) and data-source fields are
    routed into their nested dataclasses.
    """
    cfg = dataclasses.asdict(config)
    simulate = cfg.pop("simulate")
    ingest = cfg.pop("ingest")
    mcmc = cfg.pop("mcmc")
    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("iterations", "burn_in", "thin", "seed", "max_store_bytes"):
            mcmc[key] = value
        elif key in ("network", "n_nodes", "n_subjects", "design", "noise_sd", "n_points"):
            if ingest is not None:
                raise ValueError(f"override {key!r} conflicts with an ingest source")
            simulate = dict(simulate or {})
            simulate[key] = value
            if key in ("design",) and "n_points" not in overrides:
                simulate["n_points"] = None
        elif key == "ingest_path":
            simulate, ingest = None, {"path": value, "rescale_time": False}
        elif key == "rescale_time":
            if ingest is None:
                raise ValueError("rescale_time only applies to an ingest source")
            ingest["rescale_time"] = value
        elif key in cfg:
            cfg[key] = value
        else:
            raise ValueError(f"unknown override {key!r}")
    if simulate is not None:
        simulate = {k: v for k, v in simulate.items() if v is not None}
        cfg["simulate"] = SimulateSpec(**simulate)
    if ingest is not None:
        cfg["ingest"] = IngestSpec(**ingest)
    cfg["mcmc"] = McmcConfig(**mcmc)
    return ExperimentConfig(**cfg)


def dump_config_yaml(config, path):
    """Write a deterministic YAML echo of the configuration."""
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=True)
