"""Experiment configuration: a flat, sectioned key-value text format.

Sections and keys (all optional except [flux] m):

    [flux]         m
    [variant]      mode, diffusivity_eps, rh_stabilizer_eps,
                   enable_interface_average, welge_form
    [architecture] pre_shock, post_shock, single   (comma-separated widths)
    [train]        epochs, learning_rate, adam_beta1, adam_beta2, adam_eps,
                   seed
    [sampling]     n_ic, n_bc, n_pre_shock, n_post_shock, n_interface,
                   band_halfwidth, seed
    [outputs]      directory, export_plan, export_profiles

Parsing then serializing yields a canonical form that is a fixed point of
the round trip, so a run's metadata pins every resolved default.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

from .flux import ModifiedFluxKind
from .losses import Mode, VariantConfig
from .sampling import DEFAULT_BAND_HALFWIDTH, SampleCounts
from .training import TrainConfig


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    m: float = 2.0
    mode: Mode = Mode.XPINN
    diffusivity_eps: float = 2.5e-3
    rh_stabilizer_eps: float = 1e-8
    enable_interface_average: bool = False
    welge_form: ModifiedFluxKind = ModifiedFluxKind.WELGE_AS_WRITTEN
    arch_pre_shock: list[int] = field(default_factory=lambda: [2, 30, 20, 1])
    arch_post_shock: list[int] = field(default_factory=lambda: [2, 10, 1])
    arch_single: list[int] = field(default_factory=lambda: [2, 30, 22, 1])
    epochs: int = 5000
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    train_seed: int = 0
    n_ic: int = 200
    n_bc: int = 200
    n_pre_shock: int = 2000
    n_post_shock: int = 2000
    n_interface: int = 200
    band_halfwidth: float = DEFAULT_BAND_HALFWIDTH
    sampling_seed: int = 0
    out_directory: str = "runs/run"
    export_plan: bool = False
    export_profiles: bool = True
    compare_methods: list[str] = field(default_factory=list)

    # -- derived -----------------------------------------------------------

    def variant(self) -> VariantConfig:
        return VariantConfig(
            mode=self.mode,
            diffusivity_eps=self.diffusivity_eps,
            rh_stabilizer_eps=self.rh_stabilizer_eps,
            enable_interface_average=self.enable_interface_average,
            welge_form=self.welge_form,
        )

    def architectures(self) -> list[list[int]]:
        if self.variant().n_subnets == 2:
            return [list(self.arch_pre_shock), list(self.arch_post_shock)]
        return [list(self.arch_single)]

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            variant=self.variant(),
            architectures=self.architectures(),
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_eps=self.adam_eps,
            rng_seed=self.train_seed,
        )

    def sample_counts(self) -> SampleCounts:
        return SampleCounts(
            n_ic=self.n_ic,
            n_bc=self.n_bc,
            n_pre=self.n_pre_shock,
            n_post=self.n_post_shock,
            n_interface=self.n_interface,
        )

    def with_mode(self, mode: Mode) -> "ExperimentConfig":
        return replace(self, mode=mode)

    # -- serialization -----------------------------------------------------

    def to_string(self) -> str:
        cp = configparser.ConfigParser()
        cp["flux"] = {"m": repr(self.m)}
        cp["variant"] = {
            "mode": self.mode.value,
            "diffusivity_eps": repr(self.diffusivity_eps),
            "rh_stabilizer_eps": repr(self.rh_stabilizer_eps),
            "enable_interface_average": str(self.enable_interface_average).lower(),
            "welge_form": self.welge_form.value,
        }
        cp["architecture"] = {
            "pre_shock": ",".join(map(str, self.arch_pre_shock)),
            "post_shock": ",".join(map(str, self.arch_post_shock)),
            "single": ",".join(map(str, self.arch_single)),
        }
        cp["train"] = {
            "epochs": str(self.epochs),
            "learning_rate": repr(self.learning_rate),
            "adam_beta1": repr(self.adam_beta1),
            "adam_beta2": repr(self.adam_beta2),
            "adam_eps": repr(self.adam_eps),
            "seed": str(self.train_seed),
        }
        cp["sampling"] = {
            "n_ic": str(self.n_ic),
            "n_bc": str(self.n_bc),
            "n_pre_shock": str(self.n_pre_shock),
            "n_post_shock": str(self.n_post_shock),
            "n_interface": str(self.n_interface),
            "band_halfwidth": repr(self.band_halfwidth),
            "seed": str(self.sampling_seed),
        }
        cp["outputs"] = {
            "directory": self.out_directory,
            "export_plan": str(self.export_plan).lower(),
            "export_profiles": str(self.export_profiles).lower(),
        }
        if self.compare_methods:
            cp["compare"] = {"methods": ",".join(self.compare_methods)}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_string())


_PARSERS = {
    ("flux", "m"): ("m", float),
    ("variant", "mode"): ("mode", Mode),
    ("variant", "diffusivity_eps"): ("diffusivity_eps", float),
    ("variant", "rh_stabilizer_eps"): ("rh_stabilizer_eps", float),
    ("variant", "enable_interface_average"): ("enable_interface_average", "bool"),
    ("variant", "welge_form"): ("welge_form", ModifiedFluxKind),
    ("architecture", "pre_shock"): ("arch_pre_shock", "widths"),
    ("architecture", "post_shock"): ("arch_post_shock", "widths"),
    ("architecture", "single"): ("arch_single", "widths"),
    ("train", "epochs"): ("epochs", int),
    ("train", "learning_rate"): ("learning_rate", float),
    ("train", "adam_beta1"): ("adam_beta1", float),
    ("train", "adam_beta2"): ("adam_beta2", float),
    ("train", "adam_eps"): ("adam_eps", float),
    ("train", "seed"): ("train_seed", int),
    ("sampling", "n_ic"): ("n_ic", int),
    ("sampling", "n_bc"): ("n_bc", int),
    ("sampling", "n_pre_shock"): ("n_pre_shock", int),
    ("sampling", "n_post_shock"): ("n_post_shock", int),
    ("sampling", "n_interface"): ("n_interface", int),
    ("sampling", "band_halfwidth"): ("band_halfwidth", float),
    ("sampling", "seed"): ("sampling_seed", int),
    ("outputs", "directory"): ("out_directory", str),
    ("outputs", "export_plan"): ("export_plan", "bool"),
    ("outputs", "export_profiles"): ("export_profiles", "bool"),
    ("compare", "methods"): ("compare_methods", "names"),
}

_BOOLS = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _convert(conv, raw, where):
    try:
        if conv == "bool":
            return _BOOLS[raw.strip().lower()]
        if conv == "widths":
            return [int(p) for p in raw.split(",") if p.strip()]
        if conv == "names":
            return [p.strip() for p in raw.split(",") if p.strip()]
        return conv(raw)
    except (ValueError, KeyError) as err:
        raise ConfigError(f"bad value {raw!r} for {where}: {err}") from err


def parse_string(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as err:
        raise ConfigError(str(err)) from err
    cfg = ExperimentConfig()
    for section in cp.sections():
        for key, raw in cp[section].items():
            spec = _PARSERS.get((section, key))
            if spec is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            attr, conv = spec
            setattr(cfg, attr, _convert(conv, raw, f"[{section}] {key}"))
    return cfg


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_string(fh.read())
