"""Run configuration files.

INI syntax via configparser, one key per simulation field, grouped in the
sections [model], [time], [ensemble], [init], [gamma] and optional
[outputs].  See the README for the documented schema.  Parsing errors and
invariant violations name the offending section and key.
"""

from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass

from .exponents import admissible_existence
from .integrator import ConfigError, GaussianInit, SimConfig, SingleModeInit
from .noise import ExplicitSpectrum, PowerLawSpectrum

__all__ = ["parse_config", "parse_config_string", "OutputOptions", "config_to_ini"]


@dataclass(frozen=True)
class OutputOptions:
    snapshots: bool = False


class _Section:
    def __init__(self, parser, name):
        self.name = name
        if name not in parser:
            raise ConfigError(f"[{name}]: section missing")
        self.sec = parser[name]

    def get(self, key, conv, default=None):
        if key not in self.sec:
            if default is not None:
                return default
            raise ConfigError(f"[{self.name}] {key}: key missing")
        raw = self.sec[key]
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{self.name}] {key}: cannot parse {raw!r} ({exc})")

    def has(self, key):
        return key in self.sec


def _as_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _as_int_vector(raw: str):
    return tuple(int(tok) for tok in raw.split())


def _parse_init(parser, d):
    sec = _Section(parser, "init")
    kind = sec.get("kind", str)
    if kind == "single_mode":
        return SingleModeInit(z=sec.get("z", _as_int_vector),
                              j=sec.get("j", int),
                              amplitude=sec.get("amplitude", float))
    if kind == "gaussian":
        return GaussianInit(sigma=sec.get("sigma", float),
                            decay=sec.get("decay", float))
    raise ConfigError(f"[init] kind: unknown kind {kind!r}")


def _parse_gamma(parser, d):
    sec = _Section(parser, "gamma")
    kind = sec.get("kind", str)
    if kind == "power":
        return PowerLawSpectrum(c=sec.get("c", float), s=sec.get("s", float))
    if kind == "explicit":
        raw = sec.get("entries", str, default="")
        items = []
        for lineno, line in enumerate(raw.strip().splitlines()):
            toks = line.split()
            if not toks:
                continue
            if len(toks) != d + 2:
                raise ConfigError(
                    f"[gamma] entries line {lineno + 1}: need d z-components, "
                    f"j and a value ({d + 2} tokens), got {len(toks)}")
            try:
                z = tuple(int(t) for t in toks[:d])
                j = int(toks[d])
                g = float(toks[d + 1])
            except ValueError as exc:
                raise ConfigError(f"[gamma] entries line {lineno + 1}: {exc}")
            items.append((z, j, g))
        return ExplicitSpectrum.from_items(items)
    raise ConfigError(f"[gamma] kind: unknown kind {kind!r}")


def parse_config_string(text: str):
    """Parse INI text into (SimConfig, OutputOptions)."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}")
    model = _Section(parser, "model")
    time = _Section(parser, "time")
    ens = _Section(parser, "ensemble")
    d = model.get("d", int)
    p = model.get("p", float)
    config = SimConfig(
        d=d, p=p,
        nu=model.get("nu", float),
        n=model.get("n", int),
        dt=time.get("dt", float),
        T=time.get("T", float),
        n_paths=ens.get("n_paths", int),
        seed=ens.get("seed", int),
        stepper=ens.get("stepper", str, default="tamed"),
        record_every=ens.get("record_every", int, default=1),
        norm_ceiling=ens.get("norm_ceiling", float, default=1e6),
        init=_parse_init(parser, d),
        gamma=_parse_gamma(parser, d),
    )
    if not admissible_existence(p, d):
        warnings.warn(
            f"(p={p}, d={d}) lies outside the known existence range; the run "
            "proceeds but is not covered by the well-posedness theory",
            stacklevel=2)
    outputs = OutputOptions()
    if "outputs" in parser:
        out = _Section(parser, "outputs")
        outputs = OutputOptions(snapshots=out.get("snapshots", _as_bool,
                                                  default=False))
    return config, outputs


def parse_config(path) -> tuple:
    """Parse a config file into (SimConfig, OutputOptions)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"config file: {exc}")
    return parse_config_string(text)


def config_to_ini(config: SimConfig, outputs: OutputOptions = OutputOptions()) -> str:
    """Serialize a config back to INI text (manifest snapshot)."""
    lines = [
        "[model]",
        f"d = {config.d}",
        f"p = {config.p!r}",
        f"nu = {config.nu!r}",
        f"n = {config.n}",
        "",
        "[time]",
        f"dt = {config.dt!r}",
        f"T = {config.T!r}",
        "",
        "[ensemble]",
        f"n_paths = {config.n_paths}",
        f"seed = {config.seed}",
        f"stepper = {config.stepper}",
        f"record_every = {config.record_every}",
        f"norm_ceiling = {config.norm_ceiling!r}",
        "",
        "[init]",
    ]
    init = config.init
    if isinstance(init, SingleModeInit):
        lines += ["kind = single_mode",
                  "z = " + " ".join(str(c) for c in init.z),
                  f"j = {init.j}", f"amplitude = {init.amplitude!r}"]
    else:
        lines += ["kind = gaussian", f"sigma = {init.sigma!r}",
                  f"decay = {init.decay!r}"]
    lines += ["", "[gamma]"]
    gamma = config.gamma
    if isinstance(gamma, PowerLawSpectrum):
        lines += ["kind = power", f"c = {gamma.c!r}", f"s = {gamma.s!r}"]
    else:
        lines += ["kind = explicit", "entries ="]
        for z, j, g in gamma.entries:
            lines.append("    " + " ".join(str(c) for c in z) + f" {j} {g!r}")
    lines += ["", "[outputs]", f"snapshots = {str(outputs.snapshots).lower()}", ""]
    return "\n".join(lines)
