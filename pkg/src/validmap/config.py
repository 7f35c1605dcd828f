"""Run-configuration files: flat ``key = value`` pairs under one section per
concern. Unknown sections or keys are rejected with the offending line
number, since a silently ignored typo would invalidate an experiment.

Example::

    [campaign]
    benchmark = styblinski-tang-2d
    strategy = mis
    seed = 3

    [gp]
    kernel = full
    restarts = 5

    [eval]
    every = 5
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .exceptions import ConfigError

_STRATEGIES = ("mis", "u", "u2", "random")
_KERNELS = ("full", "matern52")


def _positive(kind):
    def convert(text):
        value = kind(text)
        if value <= 0:
            raise ValueError("must be positive")
        return value

    return convert


def _choice(options):
    def convert(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text

    return convert


def _fraction(text):
    value = float(text)
    if not (0.0 < value < 1.0):
        raise ValueError("must lie in (0, 1)")
    return value


# section -> key -> (settings field, converter)
_SCHEMA = {
    "campaign": {
        "benchmark": ("case_id", str),
        "strategy": ("strategy", _choice(_STRATEGIES)),
        "xi": ("xi", _positive(float)),
        "sigma_e": ("sigma_e", float),
        "omega": ("omega", float),
        "n_init": ("n_init", _positive(int)),
        "n_adapt": ("n_adapt", int),
        "seed": ("seed", int),
        "candidates": ("candidates", _positive(int)),
        "stop_alpha": ("stop_alpha", _fraction),
        "stop_k": ("stop_k", _positive(int)),
        "retrain_every_until": ("retrain_every_until", _positive(int)),
        "retrain_every_after": ("retrain_every_after", _positive(int)),
    },
    "gp": {
        "kernel": ("kernel", _choice(_KERNELS)),
        "restarts": ("restarts", _positive(int)),
    },
    "eval": {
        "every": ("eval_every", _positive(int)),
        "conf_alpha": ("conf_alpha", _fraction),
        "test_points": ("test_points", _positive(int)),
    },
    "output": {
        "dir": ("out_dir", str),
    },
}


@dataclass
class RunSettings:
    """Everything one ``run`` invocation needs; unset values fall back to
    benchmark-case or campaign defaults."""

    case_id: str
    strategy: str = "mis"
    xi: float | None = None
    sigma_e: float | None = None
    omega: float | None = None
    n_init: int | None = None
    n_adapt: int | None = None
    seed: int = 1
    candidates: int | None = None
    stop_alpha: float | None = None
    stop_k: int = 3
    retrain_every_until: int = 1
    retrain_every_after: int = 4
    kernel: str = "full"
    restarts: int = 5
    eval_every: int = 5
    conf_alpha: float = 0.1
    test_points: int | None = None
    out_dir: str | None = None


_FIELDS = {f.name for f in fields(RunSettings)}


def load_run_settings(path) -> RunSettings:
    """Parse and validate a configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc

    values = {}
    section = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if section is None:
            raise ConfigError(f"{path}:{lineno}: key outside any [section]")
        key, _, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if key not in _SCHEMA[section]:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} in section [{section}]"
            )
        if key in values.get(section, {}):
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if text == "":
            continue  # empty value = unset
        field, convert = _SCHEMA[section][key]
        try:
            converted = convert(text)
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: bad value for {key!r}: {exc}"
            ) from exc
        values.setdefault(section, {})[key] = (field, converted)

    kwargs = {}
    for section_values in values.values():
        for field, converted in section_values.values():
            assert field in _FIELDS
            kwargs[field] = converted
    if "case_id" not in kwargs:
        raise ConfigError(f"{path}: missing required key 'benchmark' in [campaign]")
    return RunSettings(**kwargs)
