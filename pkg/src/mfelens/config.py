"""Run configuration: parsing, validation, and canonical serialization.

Configs are INI text with a fixed schema; unknown sections or keys are hard
errors so presets cannot drift silently.  Parsing applies defaults, so a
minimal file needs only ``[run] task = ...``.  Serialization is canonical
(sorted keys, 17-significant-digit floats): parse -> serialize -> parse is
the identity on configs.
"""

import configparser
import math
from dataclasses import dataclass, field

from .errors import ConfigError

TASKS = ("simulate", "modes", "optimize", "rwa_check", "raypath")
PROPAGATORS = ("auto", "dense", "rk4", "arrowhead")
EMITTER_MODES = ("two_atoms", "ensembles")
OPTIMIZABLE = ("g", "omega_c", "R", "r_a_over_R")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    if isinstance(value, (tuple, list)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def _parse_float(text: str, key: str) -> float:
    token = text.strip()
    try:
        if token == "pi":
            return math.pi
        if token == "-pi":
            return -math.pi
        return float(token)
    except ValueError:
        raise ConfigError(f"expected a number for {key}, got {text!r}", key=key) from None


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer for {key}, got {text!r}", key=key) from None


def _parse_bool(text: str, key: str) -> bool:
    token = text.strip().lower()
    if token in ("true", "yes", "on", "1"):
        return True
    if token in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"expected a boolean for {key}, got {text!r}", key=key)


def _parse_floats(text: str, key: str) -> tuple:
    tokens = [t for t in text.split(",") if t.strip()]
    return tuple(_parse_float(t, key) for t in tokens)


@dataclass(frozen=True)
class LensConfig:
    r_over_lambda_a: float = 3.0
    n0: float = 1.0


@dataclass(frozen=True)
class EnsembleConfig:
    n: int = 100
    sigma_over_r: float = 0.02
    seed: int = 1
    g_individual: float = 0.05


@dataclass(frozen=True)
class EmittersConfig:
    mode: str = "two_atoms"
    r_a_over_r: float = 0.6
    phi: tuple = (math.pi, 0.0)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)


@dataclass(frozen=True)
class CouplingConfig:
    g: float = 0.5
    omega_c: float = 0.1
    drop_sqrt_omega: bool = False
    truncation_sigmas: float = 3.0


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float | None = None
    t_max: float = 150.0
    sample_every: float = 0.05
    propagator: str = "auto"


@dataclass(frozen=True)
class FramesConfig:
    grid_n: int = 256
    times: tuple = ()
    clip: float | None = None


@dataclass(frozen=True)
class OutputsConfig:
    populations_csv: str = "populations.csv"
    summary_json: str = "summary.json"
    frames: FramesConfig = field(default_factory=FramesConfig)


@dataclass(frozen=True)
class RwaConfig:
    max_modes: int = 40
    lambda_cr: float = 1.0


@dataclass(frozen=True)
class OptimizeConfig:
    free_parameters: tuple = ("g", "omega_c")
    budget: int = 200
    drop_sqrt_omega: bool = False
    retruncate: bool = False
    objective_window: tuple = (0.5, 1.5)
    bounds: tuple = ()  # of (name, lo, hi)


@dataclass(frozen=True)
class RunConfig:
    task: str
    lens: LensConfig = field(default_factory=LensConfig)
    emitters: EmittersConfig = field(default_factory=EmittersConfig)
    coupling: CouplingConfig = field(default_factory=CouplingConfig)
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    rwa: RwaConfig = field(default_factory=RwaConfig)
    optimize: OptimizeConfig = field(default_factory=OptimizeConfig)


# section -> key -> (parser, attribute); the schema is the single source of
# truth for what may appear in a file
_SCHEMA = {
    "run": {"task": "str"},
    "lens": {"R_over_lambda_a": "float", "n0": "float"},
    "emitters": {"mode": "str", "r_a_over_R": "float", "phi": "floats"},
    "emitters.ensemble": {
        "n": "int",
        "sigma_over_R": "float",
        "seed": "int",
        "g_individual": "float",
    },
    "coupling": {
        "g": "float",
        "omega_c": "float",
        "drop_sqrt_omega": "bool",
        "truncation_sigmas": "float",
    },
    "integration": {
        "dt": "optfloat",
        "t_max": "float",
        "sample_every": "float",
        "propagator": "str",
    },
    "outputs": {"populations_csv": "str", "summary_json": "str"},
    "outputs.frames": {"grid_n": "int", "times": "floats", "clip": "optfloat"},
    "rwa": {"max_modes": "int", "lambda_cr": "float"},
    "optimize": {
        "free_parameters": "strs",
        "budget": "int",
        "drop_sqrt_omega": "bool",
        "retruncate": "bool",
        "objective_window": "floats",
    },
    "optimize.bounds": {name: "floats" for name in OPTIMIZABLE},
}


def _convert(kind: str, text: str, key: str):
    if kind == "str":
        return text.strip()
    if kind == "strs":
        return tuple(t.strip() for t in text.split(",") if t.strip())
    if kind == "float":
        return _parse_float(text, key)
    if kind == "optfloat":
        return None if not text.strip() else _parse_float(text, key)
    if kind == "int":
        return _parse_int(text, key)
    if kind == "bool":
        return _parse_bool(text, key)
    if kind == "floats":
        return _parse_floats(text, key)
    raise AssertionError(kind)


def _read_sections(text: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config text failed to parse: {exc}") from exc

    values: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section)
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}]",
                    key=f"{section}.{key}",
                )
            qualified = f"{section}.{key}"
            values[qualified] = _convert(_SCHEMA[section][key], parser[section][key], qualified)
    return values


def _require_positive(value, key):
    if not value > 0:
        raise ConfigError(f"{key} must be strictly positive, got {value}", key=key)


def parse_config(text: str) -> RunConfig:
    """Parse and validate INI text into a RunConfig with defaults applied."""
    v = _read_sections(text)

    if "run.task" not in v:
        raise ConfigError("missing required key run.task", key="run.task")
    task = v["run.task"]
    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}, expected one of {TASKS}", key="run.task")

    lens = LensConfig(
        r_over_lambda_a=v.get("lens.R_over_lambda_a", 3.0),
        n0=v.get("lens.n0", 1.0),
    )
    ensemble = EnsembleConfig(
        n=v.get("emitters.ensemble.n", 100),
        sigma_over_r=v.get("emitters.ensemble.sigma_over_R", 0.02),
        seed=v.get("emitters.ensemble.seed", 1),
        g_individual=v.get("emitters.ensemble.g_individual", 0.05),
    )
    emitters = EmittersConfig(
        mode=v.get("emitters.mode", "two_atoms"),
        r_a_over_r=v.get("emitters.r_a_over_R", 0.6),
        phi=v.get("emitters.phi", (math.pi, 0.0)),
        ensemble=ensemble,
    )
    coupling = CouplingConfig(
        g=v.get("coupling.g", 0.5),
        omega_c=v.get("coupling.omega_c", 0.1),
        drop_sqrt_omega=v.get("coupling.drop_sqrt_omega", False),
        truncation_sigmas=v.get("coupling.truncation_sigmas", 3.0),
    )
    integration = IntegrationConfig(
        dt=v.get("integration.dt", None),
        t_max=v.get("integration.t_max", 150.0),
        sample_every=v.get("integration.sample_every", 0.05),
        propagator=v.get("integration.propagator", "auto"),
    )
    frames = FramesConfig(
        grid_n=v.get("outputs.frames.grid_n", 256),
        times=v.get("outputs.frames.times", ()),
        clip=v.get("outputs.frames.clip", None),
    )
    outputs = OutputsConfig(
        populations_csv=v.get("outputs.populations_csv", "populations.csv"),
        summary_json=v.get("outputs.summary_json", "summary.json"),
        frames=frames,
    )
    rwa = RwaConfig(
        max_modes=v.get("rwa.max_modes", 40),
        lambda_cr=v.get("rwa.lambda_cr", 1.0),
    )
    bounds = []
    for name in OPTIMIZABLE:
        qualified = f"optimize.bounds.{name}"
        if qualified in v:
            pair = v[qualified]
            if len(pair) != 2:
                raise ConfigError(
                    f"{qualified} must be 'lo, hi', got {len(pair)} values", key=qualified
                )
            bounds.append((name, pair[0], pair[1]))
    optimize = OptimizeConfig(
        free_parameters=v.get("optimize.free_parameters", ("g", "omega_c")),
        budget=v.get("optimize.budget", 200),
        drop_sqrt_omega=v.get("optimize.drop_sqrt_omega", False),
        retruncate=v.get("optimize.retruncate", False),
        objective_window=v.get("optimize.objective_window", (0.5, 1.5)),
        bounds=tuple(bounds),
    )

    config = RunConfig(
        task=task,
        lens=lens,
        emitters=emitters,
        coupling=coupling,
        integration=integration,
        outputs=outputs,
        rwa=rwa,
        optimize=optimize,
    )
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    _require_positive(config.lens.r_over_lambda_a, "lens.R_over_lambda_a")
    _require_positive(config.lens.n0, "lens.n0")

    em = config.emitters
    if em.mode not in EMITTER_MODES:
        raise ConfigError(
            f"emitters.mode must be one of {EMITTER_MODES}, got {em.mode!r}",
            key="emitters.mode",
        )
    _require_positive(em.r_a_over_r, "emitters.r_a_over_R")
    if not em.r_a_over_r < 1.0:
        raise ConfigError(
            f"emitters.r_a_over_R must be below 1 (inside the lens), got {em.r_a_over_r}",
            key="emitters.r_a_over_R",
        )
    if len(em.phi) != 2:
        raise ConfigError(
            f"emitters.phi must list exactly two angles, got {len(em.phi)}",
            key="emitters.phi",
        )
    _require_positive(em.ensemble.n, "emitters.ensemble.n")
    if em.ensemble.sigma_over_r < 0:
        raise ConfigError(
            f"emitters.ensemble.sigma_over_R must be non-negative, got {em.ensemble.sigma_over_r}",
            key="emitters.ensemble.sigma_over_R",
        )
    _require_positive(em.ensemble.g_individual, "emitters.ensemble.g_individual")

    _require_positive(config.coupling.g, "coupling.g")
    _require_positive(config.coupling.omega_c, "coupling.omega_c")
    _require_positive(config.coupling.truncation_sigmas, "coupling.truncation_sigmas")

    integ = config.integration
    if integ.dt is not None:
        _require_positive(integ.dt, "integration.dt")
    _require_positive(integ.t_max, "integration.t_max")
    _require_positive(integ.sample_every, "integration.sample_every")
    if integ.propagator not in PROPAGATORS:
        raise ConfigError(
            f"integration.propagator must be one of {PROPAGATORS}, got {integ.propagator!r}",
            key="integration.propagator",
        )

    frames = config.outputs.frames
    if frames.times and frames.grid_n < 16:
        raise ConfigError(
            f"outputs.frames.grid_n must be at least 16, got {frames.grid_n}",
            key="outputs.frames.grid_n",
        )
    for t in frames.times:
        if t < 0:
            raise ConfigError(
                f"outputs.frames.times must be non-negative, got {t}",
                key="outputs.frames.times",
            )
    if frames.clip is not None:
        _require_positive(frames.clip, "outputs.frames.clip")

    _require_positive(config.rwa.max_modes, "rwa.max_modes")
    if config.rwa.lambda_cr < 0:
        raise ConfigError(
            f"rwa.lambda_cr must be non-negative, got {config.rwa.lambda_cr}",
            key="rwa.lambda_cr",
        )

    opt = config.optimize
    for name in opt.free_parameters:
        if name not in OPTIMIZABLE:
            raise ConfigError(
                f"optimize.free_parameters contains unknown name {name!r}",
                key="optimize.free_parameters",
            )
    if len(set(opt.free_parameters)) != len(opt.free_parameters):
        raise ConfigError(
            "optimize.free_parameters lists a parameter twice",
            key="optimize.free_parameters",
        )
    _require_positive(opt.budget, "optimize.budget")
    if len(opt.objective_window) != 2 or not opt.objective_window[0] < opt.objective_window[1]:
        raise ConfigError(
            f"optimize.objective_window must be 'lo, hi' with lo < hi, got {opt.objective_window}",
            key="optimize.objective_window",
        )
    bound_names = [name for name, _, _ in opt.bounds]
    for name, lo, hi in opt.bounds:
        if not (0 < lo < hi):
            raise ConfigError(
                f"optimize.bounds.{name} must satisfy 0 < lo < hi, got ({lo}, {hi})",
                key=f"optimize.bounds.{name}",
            )
    if config.task == "optimize":
        missing = [n for n in opt.free_parameters if n not in bound_names]
        if missing:
            raise ConfigError(
                f"optimize task needs bounds for every free parameter; missing {missing}",
                key=f"optimize.bounds.{missing[0]}",
            )


def serialize_config(config: RunConfig) -> str:
    """Canonical INI text; parse(serialize(c)) == c."""
    lines = ["[run]", f"task = {config.task}", ""]

    lines += [
        "[lens]",
        f"R_over_lambda_a = {_fmt(config.lens.r_over_lambda_a)}",
        f"n0 = {_fmt(config.lens.n0)}",
        "",
        "[emitters]",
        f"mode = {config.emitters.mode}",
        f"r_a_over_R = {_fmt(config.emitters.r_a_over_r)}",
        f"phi = {_fmt(config.emitters.phi)}",
        "",
        "[emitters.ensemble]",
        f"n = {config.emitters.ensemble.n}",
        f"sigma_over_R = {_fmt(config.emitters.ensemble.sigma_over_r)}",
        f"seed = {config.emitters.ensemble.seed}",
        f"g_individual = {_fmt(config.emitters.ensemble.g_individual)}",
        "",
        "[coupling]",
        f"g = {_fmt(config.coupling.g)}",
        f"omega_c = {_fmt(config.coupling.omega_c)}",
        f"drop_sqrt_omega = {_fmt(config.coupling.drop_sqrt_omega)}",
        f"truncation_sigmas = {_fmt(config.coupling.truncation_sigmas)}",
        "",
        "[integration]",
    ]
    if config.integration.dt is not None:
        lines.append(f"dt = {_fmt(config.integration.dt)}")
    lines += [
        f"t_max = {_fmt(config.integration.t_max)}",
        f"sample_every = {_fmt(config.integration.sample_every)}",
        f"propagator = {config.integration.propagator}",
        "",
        "[outputs]",
        f"populations_csv = {config.outputs.populations_csv}",
        f"summary_json = {config.outputs.summary_json}",
        "",
        "[outputs.frames]",
        f"grid_n = {config.outputs.frames.grid_n}",
    ]
    if config.outputs.frames.times:
        lines.append(f"times = {_fmt(config.outputs.frames.times)}")
    if config.outputs.frames.clip is not None:
        lines.append(f"clip = {_fmt(config.outputs.frames.clip)}")
    lines += [
        "",
        "[rwa]",
        f"max_modes = {config.rwa.max_modes}",
        f"lambda_cr = {_fmt(config.rwa.lambda_cr)}",
        "",
        "[optimize]",
        f"free_parameters = {', '.join(config.optimize.free_parameters)}",
        f"budget = {config.optimize.budget}",
        f"drop_sqrt_omega = {_fmt(config.optimize.drop_sqrt_omega)}",
        f"retruncate = {_fmt(config.optimize.retruncate)}",
        f"objective_window = {_fmt(config.optimize.objective_window)}",
    ]
    if config.optimize.bounds:
        lines += ["", "[optimize.bounds]"]
        for name, lo, hi in config.optimize.bounds:
            lines.append(f"{name} = {_fmt(lo)}, {_fmt(hi)}")
    lines.append("")
    return "\n".join(lines)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
