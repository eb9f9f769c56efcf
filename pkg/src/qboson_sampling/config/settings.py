"""Job configuration loading and strict validation."""

import json
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..artifacts import parse_float_list, parse_occupation
from ..errors import ConfigError
from ..qalgebra import Species, check_delta_grid
from .constants import Constants

# Per-command parameter schema: key -> (type, default). A default of None marks
# an optional parameter.
COMMAND_SCHEMAS: dict[str, dict[str, tuple[type, Any]]] = {
    "spectra": {
        "model": (str, "transmon"),
        "ej": (float, 50.0),
        "ec": (float, 1.0),
        "ng": (float, 0.0),
        "omega": (float, 1.0),
        "kerr": (float, 0.0),
        "q": (float, None),
        "flavor": (str, "arik-coon"),
        "levels": (int, 5),
        "ratios": (str, "-0.08,-0.033,-0.01,0,0.01,0.033,0.08"),
    },
    "qnum": {
        "q": (float, 0.99),
        "flavor": (str, "arik-coon"),
        "n_max": (int, 10),
    },
    "theorem1": {
        "alpha": (float, 0.3),
        "beta": (float, 0.0),
        "gamma": (float, 0.7),
        "nu": (float, 0.0),
        "f0": (float, 0.0),
        "deltas": (str, "0.1,0.03,0.01,0.003,0.001"),
    },
    "perm": {
        "matrix": (str, None),
        "size": (int, 4),
        "algorithm": (str, "ryser"),
        "q": (float, None),
        "partitions": (int, 1),
    },
    "dist": {
        "modes": (int, 2),
        "haar_seed": (int, None),
        "unitary": (str, None),
        "input": (str, "1,1"),
        "species": (str, "standard"),
        "engine": (str, "mesh"),
    },
    "sample": {
        "modes": (int, 2),
        "haar_seed": (int, None),
        "unitary": (str, None),
        "input": (str, "1,1"),
        "species": (str, "standard"),
        "engine": (str, "mesh"),
        "shots": (int, 1000),
    },
    "validate": {
        "seeds": (int, 20),
        "max_modes": (int, 4),
        "max_photons": (int, 3),
    },
    "bench": {
        "max_size": (int, 10),
        "algorithms": (str, "naive,ryser"),
        "repeats": (int, 1),
    },
}

TOP_LEVEL_KEYS = {"command", "parameters", "output", "seed", "json", "threads"}

# Flat sampling jobs carry their parameters at the top level.
JOB_ALIASES = {"input_occupation": "input"}
FLAT_JOB_KEYS = set(COMMAND_SCHEMAS["sample"]) | set(JOB_ALIASES)

CHOICES: dict[str, set[str]] = {
    "model": {"transmon", "kerr", "qboson", "compare", "sweep"},
    "flavor": {"arik-coon", "symmetric"},
    "algorithm": {"naive", "ryser"},
    "engine": {"mesh", "permanent", "substitution"},
}


def _coerce(command: str, key: str, expected: type, value: Any) -> Any:
    """Check a parameter value against its schema type.

    Integers are accepted where floats are expected; booleans never count as numbers.
    """
    if value is None:
        return None
    if isinstance(value, bool) and expected is not bool:
        raise ConfigError(f"Parameter '{key}' of '{command}' must be {expected.__name__}")
    if expected is float and isinstance(value, int):
        return float(value)
    if not isinstance(value, expected):
        raise ConfigError(
            f"Parameter '{key}' of '{command}' must be {expected.__name__}, "
            f"got {type(value).__name__}"
        )
    return value


def _check_value(command: str, key: str, value: Any) -> None:
    """Reject parameter values the commands could not interpret."""
    if value is None:
        return
    try:
        if key in CHOICES and value not in CHOICES[key]:
            raise ValueError(f"expected one of {', '.join(sorted(CHOICES[key]))}")
        if key == "species":
            Species.parse(value)
        elif key == "input":
            parse_occupation(value)
        elif key in ("ratios", "deltas"):
            parse_float_list(value)
        elif key == "algorithms":
            for name in value.split(","):
                if name.strip() not in CHOICES["algorithm"]:
                    raise ValueError(f"unknown algorithm '{name.strip()}'")
    except ValueError as e:
        raise ConfigError(f"Parameter '{key}' of '{command}' is invalid: {e}") from e


def _check_job(command: str, parameters: Mapping[str, Any]) -> None:
    """Reject parameter combinations a command could not run."""
    if command != "theorem1":
        return
    if parameters["alpha"] == parameters["gamma"]:
        raise ConfigError("Parameters 'alpha' and 'gamma' of 'theorem1' must differ")
    try:
        check_delta_grid(parse_float_list(parameters["deltas"]))
    except ValueError as e:
        raise ConfigError(f"Parameter 'deltas' of 'theorem1' is invalid: {e}") from e


def _lift_flat_job(data: Mapping[str, Any]) -> dict[str, Any]:
    """Move top-level sampling keys into ``parameters``.

    ``{"haar_seed": 7, "modes": 2, "input_occupation": [1, 1], "shots": 10}`` becomes a
    ``sample`` job (``dist`` without ``shots``). Occupation lists are joined to
    the ``1,1`` form.
    """
    flat = {key: data[key] for key in data if key in FLAT_JOB_KEYS}
    if not flat:
        return dict(data)
    if "parameters" in data:
        raise ConfigError(
            f"Config key '{sorted(flat)[0]}' cannot be combined with 'parameters'"
        )
    if "input" in flat and "input_occupation" in flat:
        raise ConfigError("Config keys 'input' and 'input_occupation' are exclusive")

    job = {key: value for key, value in data.items() if key not in flat}
    command = job.setdefault("command", "sample" if "shots" in flat else "dist")
    if command not in ("dist", "sample"):
        raise ConfigError(
            f"Config key '{sorted(flat)[0]}' belongs in 'parameters' for '{command}'"
        )
    parameters = {JOB_ALIASES.get(key, key): value for key, value in flat.items()}
    if command == "dist":
        parameters.pop("shots", None)
    occupation = parameters.get("input")
    if isinstance(occupation, list):
        parameters["input"] = ",".join(str(c) for c in occupation)
    job["parameters"] = parameters
    return job


def default_output(command: str, as_json: bool) -> Path:
    """Build the default artifact path under the output directory.

    Args:
        command: Subcommand name, used as the file stem.
        as_json: Whether the artifact is JSON rather than CSV.

    Returns:
        Path inside ``$QBOSON_OUTPUT_DIR`` (or the working directory).
    """
    base = Path(os.environ.get(Constants.OUTPUT_DIR_ENV, "."))
    if as_json:
        suffix = "json"
    else:
        suffix = "txt" if command == "sample" else "csv"
    return base / f"{command}.{suffix}"


@dataclass(frozen=True)
class JobConfig:
    """A validated job: one subcommand with its parameters."""

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output: Path = Path("out.csv")
    seed: int = Constants.DEFAULT_SEED
    as_json: bool = False
    threads: int = 1

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "JobConfig":
        """Build a job from a decoded mapping, rejecting unknown keys.

        Args:
            data: Mapping with ``command`` and optional ``parameters``, ``output``,
                ``seed``, ``json`` and ``threads``.

        Returns:
            JobConfig with defaults filled in for every parameter.

        Raises:
            ConfigError: If a key is unknown, missing or of the wrong type.
        """
        data = _lift_flat_job(data)
        unknown = sorted(set(data) - TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigError(f"Unknown config key: {unknown[0]}")
        if "command" not in data:
            raise ConfigError("Missing required field in config: command")

        command = data["command"]
        if command not in COMMAND_SCHEMAS:
            raise ConfigError(
                f"Unknown command: {command}\n"
                f"Expected one of: {', '.join(COMMAND_SCHEMAS)}"
            )
        schema = COMMAND_SCHEMAS[command]

        raw = data.get("parameters") or {}
        if not isinstance(raw, Mapping):
            raise ConfigError("Config key 'parameters' must be an object")
        unknown = sorted(set(raw) - set(schema))
        if unknown:
            raise ConfigError(f"Unknown parameter for '{command}': {unknown[0]}")

        parameters = {
            key: _coerce(command, key, expected, raw.get(key, default))
            for key, (expected, default) in schema.items()
        }
        for key, value in parameters.items():
            _check_value(command, key, value)
        _check_job(command, parameters)

        seed = data.get("seed", Constants.DEFAULT_SEED)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("Config key 'seed' must be a nonnegative integer")
        threads = data.get("threads", 1)
        if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
            raise ConfigError("Config key 'threads' must be a positive integer")
        as_json = data.get("json", False)
        if not isinstance(as_json, bool):
            raise ConfigError("Config key 'json' must be a boolean")

        output = data.get("output")
        output_path = Path(output) if output else default_output(command, as_json)

        return cls(
            command=command,
            parameters=parameters,
            output=output_path,
            seed=seed,
            as_json=as_json,
            threads=threads,
        )

    @classmethod
    def load(cls, config_path: Path) -> "JobConfig":
        """Load a job from a JSON config file.

        Args:
            config_path: Path to the JSON job file.

        Returns:
            Validated JobConfig.

        Raises:
            FileNotFoundError: If the config file doesn't exist.
            ConfigError: If the file is not valid JSON or fails validation.
        """
        if not config_path.exists():
            raise FileNotFoundError(f"Config file not found: {config_path}")

        try:
            with open(config_path, encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {config_path}: {e}") from e

        if not isinstance(data, Mapping):
            raise ConfigError(f"Config file {config_path} must contain a JSON object")
        return cls.from_mapping(data)
