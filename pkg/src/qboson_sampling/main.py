"""CLI entry point for qboson-sampling."""

import argparse
import json
import math
import sys
from collections import Counter
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np

from .artifacts import (
    Cell,
    distribution_rows,
    format_occupation,
    load_matrix_json,
    matrix_to_json,
    parse_float_list,
    parse_occupation,
    write_json,
    write_samples,
    write_table,
)
from .config.settings import COMMAND_SCHEMAS, JobConfig
from .errors import ConfigError
from .focksim import (
    OutcomeDistribution,
    clements_decompose,
    distribution_from_state,
    engine_equivalence,
    evolve,
    haar_unitary,
    input_state,
    sample_outcomes,
    sector_for,
    spawn_rngs,
    species_f,
    substitution_oracle,
    tv_distance,
)
from .permanent import (
    ModeUnitary,
    PermanentAlgorithm,
    benchmark,
    distribution_permanent,
    permanent,
    q_permanent,
    random_complex_matrix,
    ryser_parallel,
)
from .qalgebra import (
    BurbanParams,
    Flavor,
    QDeformation,
    Species,
    SpeciesKind,
    error_metrics,
    q_factorial,
    q_number,
    q_number_first_order,
    theorem1_check,
)
from .spectra import (
    KerrParams,
    SpectrumTable,
    TransmonParams,
    divergence_table,
    kerr_levels,
    qboson_levels,
    spectrum_compare,
    transmon_levels,
)

Summary = dict[str, Any]


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _write(config: JobConfig, header: list[str], rows: list[list[Cell]]) -> None:
    count = write_table(config.output, header, rows, config.as_json)
    _progress(f"Wrote {count} row(s) to {config.output}")


def _matrix_path(config: JobConfig, label: str) -> Path:
    return config.output.with_name(f"{config.output.stem}.{label}.json")


def _write_matrix(config: JobConfig, label: str, a: np.ndarray) -> Path:
    path = _matrix_path(config, label)
    write_json(path, matrix_to_json(a))
    _progress(f"Wrote {a.shape[0]}x{a.shape[1]} {label} to {path}")
    return path


def _spectrum_rows(table: SpectrumTable) -> list[list[Cell]]:
    return [[n, energy, table.model.value] for n, energy in table.levels]


def run_spectra(config: JobConfig) -> Summary:
    p = config.parameters
    model, levels = p["model"], p["levels"]
    summary: Summary = {"model": model, "levels": levels}
    _progress(f"Computing {model} spectrum with {levels} level(s)...")

    if model == "transmon":
        device = TransmonParams(p["ej"], p["ec"], p["ng"])
        table = transmon_levels(device, levels - 1)
        summary["ej_over_ec"] = device.ratio
        summary["in_transmon_regime"] = device.in_transmon_regime
    elif model == "kerr":
        table = kerr_levels(KerrParams(p["omega"], p["kerr"]), levels - 1)
    elif model == "qboson":
        if p["q"] is None:
            raise ConfigError("Parameter 'q' of 'spectra' is required for model qboson")
        d = QDeformation(p["q"], Flavor(p["flavor"]))
        table = qboson_levels(p["omega"], d, levels - 1)
    else:
        if model == "compare":
            tables = [spectrum_compare(p["omega"], p["kerr"], levels - 1)]
            ratios = [p["kerr"] / p["omega"]]
        else:
            ratios = parse_float_list(p["ratios"])
            tables = divergence_table(p["omega"], ratios, levels - 1)
        header = ["ratio", "index", "kerr_energy", "qboson_energy", "gap", "relative_gap"]
        rows: list[list[Cell]] = [
            [ratio, r.index, r.kerr_energy, r.qboson_energy, r.gap, r.relative_gap]
            for ratio, t in zip(ratios, tables)
            for r in t.rows
        ]
        _write(config, header, rows)
        summary["max_gap"] = max(t.max_gap for t in tables)
        summary["q"] = [t.q for t in tables]
        return summary

    _write(config, ["index", "energy", "model"], _spectrum_rows(table))
    spacings = table.spacings()
    summary["energies"] = list(table.energies)
    if len(spacings) >= 2:
        summary["anharmonicity"] = spacings[1] - spacings[0]
    return summary


def _or_overflow(compute: Callable[[], float], q: float) -> float:
    # q-numbers are positive for q > 0; the sign of an overflow is unknown otherwise
    try:
        return compute()
    except OverflowError:
        return math.inf if q > 0 else math.nan


def run_qnum(config: JobConfig) -> Summary:
    p = config.parameters
    d = QDeformation(p["q"], Flavor(p["flavor"]))
    _progress(f"Tabulating [n]_q for q={d.q!r} ({d.flavor.value}), n <= {p['n_max']}...")

    rows: list[list[Cell]] = []
    for n in range(p["n_max"] + 1):
        value = _or_overflow(lambda: q_number(n, d), d.q)
        deviation = n - value
        rows.append(
            [
                n,
                value,
                _or_overflow(lambda: q_factorial(n, d), d.q),
                q_number_first_order(n, d.q),
                deviation,
                deviation / n if n else 0.0,
            ]
        )
    _write(config, ["n", "q_number", "q_factorial", "first_order", "delta_abs", "delta_rel"], rows)

    overflowed = sum(1 for row in rows if not math.isfinite(float(row[2])))
    summary: Summary = {
        "q": d.q,
        "flavor": d.flavor.value,
        "n_max": p["n_max"],
        "factorial_overflows": overflowed,
    }
    if d.flavor is Flavor.ARIK_COON and 0 < d.q < 1:
        summary["bound_violations"] = sum(
            not error_metrics(n, d.q).within_bounds for n in range(2, p["n_max"] + 1)
        )
    return summary


def run_theorem1(config: JobConfig) -> Summary:
    p = config.parameters
    params = BurbanParams(p["alpha"], p["beta"], p["gamma"], p["nu"], p["f0"])
    _progress(f"Checking Burban oscillator {params}...")
    report = theorem1_check(params, parse_float_list(p["deltas"]))
    rows: list[list[Cell]] = [[s.delta, s.gap0, s.gap1, s.gap2] for s in report.samples]
    _write(config, ["delta", "gap0", "gap1", "gap2"], rows)
    _progress(f"Admissibility: {report.status.value} (slope {report.slope:.4g})")
    return {
        "status": report.status.value,
        "slope": None if math.isnan(report.slope) else report.slope,
    }


def run_perm(config: JobConfig) -> Summary:
    p = config.parameters
    if p["matrix"]:
        a = load_matrix_json(Path(p["matrix"]))
        _progress(f"Loaded {a.shape[0]}x{a.shape[1]} matrix from {p['matrix']}")
    else:
        a = random_complex_matrix(p["size"], config.seed)
        _progress(f"Drew random {p['size']}x{p['size']} matrix with seed {config.seed}")

    if p["q"] is not None:
        label = f"q-permanent(q={p['q']!r})"
        value = q_permanent(a, p["q"])
    elif p["algorithm"] == "ryser":
        label = "ryser"
        value = ryser_parallel(a, partitions=p["partitions"], workers=config.threads)
    else:
        label = p["algorithm"]
        value = permanent(a, PermanentAlgorithm(p["algorithm"]))

    rows: list[list[Cell]] = [[a.shape[0], label, value.real, value.imag, abs(value)]]
    _write(config, ["n", "algorithm", "re", "im", "abs"], rows)
    matrix_path = _write_matrix(config, "matrix", a)
    return {
        "n": a.shape[0],
        "algorithm": label,
        "re": value.real,
        "im": value.imag,
        "matrix": str(matrix_path),
    }


def _mode_unitary(config: JobConfig, stream: np.random.Generator) -> ModeUnitary:
    p = config.parameters
    if p["unitary"]:
        _progress(f"Loading unitary from {p['unitary']}")
        return ModeUnitary(load_matrix_json(Path(p["unitary"])))
    if p["haar_seed"] is None:
        _progress(f"Drawing {p['modes']}-mode Haar unitary from the stream of seed {config.seed}")
        return haar_unitary(p["modes"], stream)
    _progress(f"Drawing {p['modes']}-mode Haar unitary with seed {p['haar_seed']}")
    return haar_unitary(p["modes"], p["haar_seed"])


def _outcome_distribution(
    config: JobConfig, stream: np.random.Generator
) -> tuple[OutcomeDistribution, Summary]:
    p = config.parameters
    u = _mode_unitary(config, stream)
    source = parse_occupation(p["input"])
    if len(source) != u.dim:
        raise ValueError(f"Input occupation {p['input']} has {len(source)} modes, need {u.dim}")
    species = Species.parse(p["species"])
    f = species_f(species, sum(source))
    engine = p["engine"]
    _progress(f"Computing outcome distribution ({engine} engine, {species.label})...")

    norm = None
    if engine == "permanent":
        if species.kind is not SpeciesKind.STANDARD:
            raise ValueError("The permanent engine only covers standard bosons")
        dist = distribution_permanent(u, source)
    elif engine == "substitution":
        state = substitution_oracle(u, source, f)
        norm = state.norm
        dist = distribution_from_state(state)
    else:
        basis = sector_for(f, u.dim, sum(source))
        state = evolve(input_state(source, f, basis), clements_decompose(u), f)
        norm = state.norm
        dist = distribution_from_state(state)

    summary: Summary = {
        "modes": u.dim,
        "input": format_occupation(source),
        "species": species.label,
        "engine": engine,
        "outcomes": len(dist.basis),
        "total": dist.total,
        "norm": norm,
        "unitary": str(_write_matrix(config, "unitary", u.matrix)),
    }
    if species.kind is SpeciesKind.STANDARD and engine != "permanent":
        summary["tv_vs_permanent"] = tv_distance(distribution_permanent(u, source), dist)
    return dist, summary


def run_dist(config: JobConfig) -> Summary:
    unitary_stream, _ = spawn_rngs(config.seed, 2)
    dist, summary = _outcome_distribution(config, unitary_stream)
    rows: list[list[Cell]] = [list(row) for row in distribution_rows(dist)]
    _write(config, ["occupation", "probability"], rows)
    return summary


def run_sample(config: JobConfig) -> Summary:
    unitary_stream, sample_stream = spawn_rngs(config.seed, 2)
    dist, summary = _outcome_distribution(config, unitary_stream)
    shots = config.parameters["shots"]
    samples = sample_outcomes(dist, sample_stream, shots)
    if config.as_json:
        write_json(config.output, [list(s) for s in samples])
    else:
        write_samples(config.output, samples)
    _progress(f"Wrote {len(samples)} sample(s) to {config.output}")
    summary["shots"] = shots
    if samples:
        summary["tv_empirical"] = tv_distance(dist, Counter(samples))
    return summary


def run_validate(config: JobConfig) -> Summary:
    p = config.parameters
    seeds = list(range(config.seed, config.seed + p["seeds"]))
    _progress(
        f"Comparing engines over {len(seeds)} seed(s), m <= {p['max_modes']}, "
        f"n <= {p['max_photons']}..."
    )
    report = engine_equivalence(seeds, p["max_modes"], p["max_photons"], workers=config.threads)
    rows: list[list[Cell]] = [
        [
            c.seed,
            c.modes,
            format_occupation(c.source),
            c.tv_permanent_mesh,
            c.tv_mesh_substitution,
            c.tv_permanent_substitution,
        ]
        for c in report.cases
    ]
    header = [
        "seed",
        "modes",
        "input",
        "tv_permanent_mesh",
        "tv_mesh_substitution",
        "tv_permanent_substitution",
    ]
    _write(config, header, rows)
    _progress(f"Max TV distance: {report.max_tv:.3g}")
    return {"cases": len(report.cases), "max_tv": report.max_tv, "passed": report.passed}


def run_bench(config: JobConfig) -> Summary:
    p = config.parameters
    algorithms = [PermanentAlgorithm(name.strip()) for name in p["algorithms"].split(",")]
    sizes = list(range(1, p["max_size"] + 1))
    _progress(f"Timing {', '.join(a.value for a in algorithms)} for n = 1..{p['max_size']}...")
    results = benchmark(sizes, algorithms, config.seed, p["repeats"], workers=config.threads)
    rows: list[list[Cell]] = [
        [r.size, r.algorithm.value, r.wall_time_ns, r.value.real, r.value.imag] for r in results
    ]
    _write(config, ["n", "algorithm", "wall_time_ns", "re", "im"], rows)
    return {"rows": len(results)}


RUNNERS: dict[str, Callable[[JobConfig], Summary]] = {
    "spectra": run_spectra,
    "qnum": run_qnum,
    "theorem1": run_theorem1,
    "perm": run_perm,
    "dist": run_dist,
    "sample": run_sample,
    "validate": run_validate,
    "bench": run_bench,
}


def execute(config: JobConfig) -> int:
    """Run one job, write its artifact and print a one-line JSON summary.

    Args:
        config: Validated job.

    Returns:
        Exit code: 0 on success, 1 on a computation error or a failed
        validation, 2 on a configuration error.
    """
    try:
        summary = RUNNERS[config.command](config)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

    summary = {"command": config.command, "output": str(config.output), **summary}
    print(json.dumps(summary))
    return 1 if summary.get("passed") is False else 0


def _common_options(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps subcommand defaults from overwriting options given earlier
    parser.add_argument("--out", metavar="FILE", default=argparse.SUPPRESS, help="Artifact path")
    parser.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Write the artifact as JSON instead of CSV",
    )
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Random seed")
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS, help="Intra-job worker process cap"
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser; subcommand flags mirror the job schema."""
    parser = argparse.ArgumentParser(
        prog="qboson-sampling",
        description="q-deformed boson spectra, permanents and exact Fock-state sampling",
    )
    parser.add_argument("--config", metavar="FILE", help="JSON job file")
    _common_options(parser)

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command, schema in COMMAND_SCHEMAS.items():
        sub = subparsers.add_parser(command, help=f"Run the {command} job")
        for key, (expected, default) in schema.items():
            sub.add_argument(
                f"--{key.replace('_', '-')}",
                dest=key,
                type=expected,
                default=argparse.SUPPRESS,
                help=f"default: {default}",
            )
        _common_options(sub)
    return parser


def _job_from_args(args: argparse.Namespace) -> JobConfig:
    options = vars(args)
    command = options.pop("command", None)
    config_path = options.pop("config", None)
    top_level = {key: options.pop(key) for key in ("seed", "threads", "json") if key in options}
    if "out" in options:
        top_level["output"] = options.pop("out")

    if config_path:
        if command:
            raise ConfigError("--config cannot be combined with a subcommand")
        config = JobConfig.load(Path(config_path))
        _progress(f"Loaded config from {config_path}")
        data = {
            "command": config.command,
            "parameters": config.parameters,
            "output": str(config.output),
            "seed": config.seed,
            "json": config.as_json,
            "threads": config.threads,
            **top_level,
        }
        return JobConfig.from_mapping(data)

    if not command:
        raise ConfigError("Missing subcommand (or --config FILE)")
    return JobConfig.from_mapping({"command": command, "parameters": options, **top_level})


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI.

    Returns:
        Exit code (0 for success, 1 for a computation error, 2 for a bad config).
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = _job_from_args(args)
    except (ConfigError, FileNotFoundError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    return execute(config)


if __name__ == "__main__":
    sys.exit(main())
