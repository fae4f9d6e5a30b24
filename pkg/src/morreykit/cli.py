"""Config-driven entry point.

Verbs:
  run        execute a TOML run spec, write JSON/CSV reports
  verify     built-in acceptance suite (prints one line per criterion)
  norms      one-shot generalized weighted Morrey norm of a catalog function
  weights    one-shot weight-class constant over the default ball family
  operators  one-shot operator evaluation at a point, or a kernel check

Exit codes: 0 all experiments PASS / NOT-APPLICABLE / HYPOTHESIS-UNMET,
1 on any FAIL, 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .grid import Ball, ConfigurationError, geometric_ladder, make_domain
from .harness import (
    DomainSpec,
    ExperimentConfig,
    FamilySpec,
    FunctionFamilySpec,
    PsiSpec,
    WeightSpec,
    build_function_family,
    run_experiment,
    validate_config,
    _base_family,
    _build_psi,
    _build_weight,
)
from .norms import gw_morrey_norm
from .operators import (
    cz_at,
    kernel,
    kernel_from_expression,
    kernel_names,
    maximal_at,
    riesz_at,
    standard_kernel_check,
)
from .report import render_summary, write_report
from .weights import ap_constant, apq_constant

__all__ = ["RunSpec", "parse_run_spec", "serialize_run_spec", "main"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunSpec:
    """A parsed run document: global output settings plus experiments."""

    schema: int = SCHEMA_VERSION
    out_dir: str = "reports"
    formats: tuple[str, ...] = ("json", "csv")
    seed: int = 0
    experiments: tuple[ExperimentConfig, ...] = ()


class ConfigSpecError(ConfigurationError):
    """Raised on malformed run documents, with key/section context."""


# Allowed keys per section; drives unknown-key diagnostics.
_SCHEMA = {
    "": ("schema", "output", "experiment"),
    "output": ("directory", "formats", "seed"),
    "experiment": (
        "name",
        "kind",
        "p",
        "rhs_form",
        "condition",
        "radii_steps",
        "t_max",
        "nodes_per_decade",
        "tolerance",
        "levels",
        "seed",
        "operator",
        "domain",
        "weight",
        "psi1",
        "psi2",
        "family",
        "functions",
    ),
    "experiment.operator": (
        "kind",
        "alpha",
        "q",
        "kernel",
        "expression",
        "size_constant",
        "holder_exponent",
    ),
    "experiment.domain": ("dimension", "half_width", "points"),
    "experiment.weight": ("kind", "beta"),
    "experiment.psi1": ("tag", "kappa", "p", "q"),
    "experiment.psi2": ("tag", "kappa", "p", "q"),
    "experiment.family": ("center_stride", "r_min", "rho", "count", "core_fraction"),
    "experiment.functions": ("names", "power_exponent"),
}


def _line_of(text: str, key: str) -> str:
    """Best-effort line anchor: first line whose first token is the key."""
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith(f"{key} ") or stripped.startswith(f"{key}="):
            return f" (line {i})"
        if stripped.startswith(f"[{key}]") or stripped.startswith(f"[[{key}]]"):
            return f" (line {i})"
    return ""


def _check_keys(table: dict, section: str, text: str) -> None:
    allowed = _SCHEMA[section]
    for key in table:
        if key not in allowed:
            hint = difflib.get_close_matches(key, allowed, n=1, cutoff=0.5)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            where = f"section [{section}]" if section else "the top level"
            raise ConfigSpecError(
                f"unknown key {key!r} in {where}{suggestion}{_line_of(text, key)}"
            )


def _need(table: dict, key: str, section: str) -> object:
    if key not in table:
        raise ConfigSpecError(f"section [{section}] is missing required key {key!r}")
    return table[key]


def _opt_float(table: dict, key: str) -> float | None:
    return None if table.get(key) is None else float(table[key])


def _parse_experiment(entry: dict, text: str, index: int, global_seed: int) -> ExperimentConfig:
    section = "experiment"
    _check_keys(entry, section, text)
    for sub in ("operator", "domain", "weight", "psi1", "psi2", "family", "functions"):
        if sub in entry:
            if not isinstance(entry[sub], dict):
                raise ConfigSpecError(
                    f"[experiment.{sub}] must be a table{_line_of(text, sub)}"
                )
            _check_keys(entry[sub], f"experiment.{sub}", text)

    op = entry.get("operator")
    if not isinstance(op, dict):
        raise ConfigSpecError(
            f"experiment #{index} needs an [experiment.operator] table with a 'kind'"
        )
    op_kind = str(_need(op, "kind", "experiment.operator"))
    if "expression" in op:
        kernel_name = str(_need(op, "kernel", "experiment.operator"))
        dom = entry.get("domain", {})
        kernel_from_expression(
            kernel_name,
            str(op["expression"]),
            dimension=int(dom.get("dimension", 1)),
            size_constant=float(_need(op, "size_constant", "experiment.operator")),
            holder_exponent=float(op.get("holder_exponent", 1.0)),
        )

    def psi(name: str) -> PsiSpec | None:
        table = entry.get(name)
        if table is None:
            return None
        return PsiSpec(
            tag=str(table.get("tag", "power")),
            kappa=_opt_float(table, "kappa"),
            p=_opt_float(table, "p"),
            q=_opt_float(table, "q"),
        )

    dom = entry.get("domain", {})
    wt = entry.get("weight", {})
    fam = entry.get("family", {})
    fns = entry.get("functions", {})
    cfg = ExperimentConfig(
        name=str(entry.get("name", f"experiment-{index}")),
        kind=str(_need(entry, "kind", section)),
        operator=op_kind,
        p=float(_need(entry, "p", section)),
        q=_opt_float(op, "q"),
        alpha=_opt_float(op, "alpha"),
        kernel=None if op.get("kernel") is None else str(op["kernel"]),
        rhs_form=None if entry.get("rhs_form") is None else str(entry["rhs_form"]),
        condition=None if entry.get("condition") is None else str(entry["condition"]),
        domain=DomainSpec(
            dimension=int(dom.get("dimension", 1)),
            half_width=float(dom.get("half_width", 4.0)),
            points=int(dom.get("points", 256)),
        ),
        weight=WeightSpec(
            kind=str(wt.get("kind", "constant")), beta=float(wt.get("beta", 0.0))
        ),
        psi1=psi("psi1"),
        psi2=psi("psi2"),
        family=FamilySpec(
            center_stride=int(fam.get("center_stride", 32)),
            r_min=_opt_float(fam, "r_min"),
            rho=float(fam.get("rho", 2.0)),
            count=int(fam.get("count", 6)),
            core_fraction=float(fam.get("core_fraction", 0.5)),
        ),
        functions=FunctionFamilySpec(
            names=tuple(str(s) for s in fns.get("names", FunctionFamilySpec().names)),
            power_exponent=_opt_float(fns, "power_exponent"),
        ),
        radii_steps=int(entry.get("radii_steps", 48)),
        t_max=float(entry.get("t_max", 50.0)),
        nodes_per_decade=int(entry.get("nodes_per_decade", 64)),
        tolerance=float(entry.get("tolerance", 1.25)),
        levels=int(entry.get("levels", 1)),
        seed=int(entry.get("seed", global_seed)),
    )
    try:
        return validate_config(cfg)
    except ConfigurationError as exc:
        raise ConfigSpecError(f"experiment {cfg.name!r}: {exc}") from exc


def parse_run_spec(text: str) -> RunSpec:
    """Parse and validate a TOML run document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigSpecError(f"not valid TOML: {exc}") from exc
    _check_keys(doc, "", text)
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigSpecError(
            f"unrecognized schema version {schema!r}; this build reads version "
            f"{SCHEMA_VERSION}"
        )
    output = doc.get("output", {})
    if not isinstance(output, dict):
        raise ConfigSpecError("[output] must be a table")
    _check_keys(output, "output", text)
    seed = int(output.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigSpecError(f"seed must fit in 64 unsigned bits, got {seed}")
    formats = tuple(str(f) for f in output.get("formats", ("json", "csv")))
    for fmt in formats:
        if fmt not in ("json", "csv"):
            raise ConfigSpecError(f"unknown report format {fmt!r}; known: json, csv")
    entries = doc.get("experiment", [])
    if isinstance(entries, dict):
        entries = [entries]
    if not entries:
        raise ConfigSpecError("a run spec needs at least one [[experiment]] entry")
    experiments = tuple(
        _parse_experiment(e, text, i, seed) for i, e in enumerate(entries)
    )
    return RunSpec(
        schema=schema,
        out_dir=str(output.get("directory", "reports")),
        formats=formats,
        seed=seed,
        experiments=experiments,
    )


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r} to TOML")


def _emit_table(lines: list[str], header: str, items: dict) -> None:
    lines.append(header)
    for key, value in items.items():
        if value is not None:
            lines.append(f"{key} = {_toml_value(value)}")
    lines.append("")


def serialize_run_spec(spec: RunSpec) -> str:
    """Render a RunSpec back to TOML; parse(serialize(s)) == s."""
    lines: list[str] = [f"schema = {spec.schema}", ""]
    _emit_table(
        lines,
        "[output]",
        {
            "directory": spec.out_dir,
            "formats": list(spec.formats),
            "seed": spec.seed,
        },
    )
    for cfg in spec.experiments:
        _emit_table(
            lines,
            "[[experiment]]",
            {
                "name": cfg.name,
                "kind": cfg.kind,
                "p": float(cfg.p),
                "rhs_form": cfg.rhs_form,
                "condition": cfg.condition,
                "radii_steps": cfg.radii_steps,
                "t_max": float(cfg.t_max),
                "nodes_per_decade": cfg.nodes_per_decade,
                "tolerance": float(cfg.tolerance),
                "levels": cfg.levels,
                "seed": cfg.seed,
            },
        )
        _emit_table(
            lines,
            "[experiment.operator]",
            {
                "kind": cfg.operator,
                "alpha": cfg.alpha,
                "q": cfg.q,
                "kernel": cfg.kernel,
            },
        )
        _emit_table(
            lines,
            "[experiment.domain]",
            {
                "dimension": cfg.domain.dimension,
                "half_width": float(cfg.domain.half_width),
                "points": cfg.domain.points,
            },
        )
        _emit_table(
            lines,
            "[experiment.weight]",
            {"kind": cfg.weight.kind, "beta": float(cfg.weight.beta)},
        )
        for name, psi in (("psi1", cfg.psi1), ("psi2", cfg.psi2)):
            if psi is not None:
                _emit_table(
                    lines,
                    f"[experiment.{name}]",
                    {"tag": psi.tag, "kappa": psi.kappa, "p": psi.p, "q": psi.q},
                )
        _emit_table(
            lines,
            "[experiment.family]",
            {
                "center_stride": cfg.family.center_stride,
                "r_min": cfg.family.r_min,
                "rho": float(cfg.family.rho),
                "count": cfg.family.count,
                "core_fraction": float(cfg.family.core_fraction),
            },
        )
        _emit_table(
            lines,
            "[experiment.functions]",
            {
                "names": list(cfg.functions.names),
                "power_exponent": cfg.functions.power_exponent,
            },
        )
    return "\n".join(lines)


def _cmd_run(args) -> int:
    try:
        text = open(args.config, "r", encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        spec = parse_run_spec(text)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        spec = replace(
            spec,
            seed=args.seed,
            experiments=tuple(replace(c, seed=args.seed) for c in spec.experiments),
        )
    out_dir = args.out or spec.out_dir
    formats = tuple(args.formats.split(",")) if args.formats else spec.formats
    try:
        workers = max(1, args.threads)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_experiment, spec.experiments))
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = False
    for rep in reports:
        try:
            write_report(rep, out_dir, formats)
        except (OSError, ValueError) as exc:
            print(f"error: cannot write report to {out_dir}: {exc}", file=sys.stderr)
            return 2
        print(render_summary(rep))
        failed = failed or rep.status == "FAIL"
    return 1 if failed else 0


def _cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all()
    for res in results:
        print(res.line())
    return 0 if all(r.passed for r in results) else 1


def _grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dimension", type=int, default=1)
    parser.add_argument("--half-width", type=float, default=4.0)
    parser.add_argument("--points", type=int, default=256)


def _make_weight_spec(args) -> WeightSpec:
    return WeightSpec(kind=args.weight, beta=args.beta)


def _cmd_norms(args) -> int:
    domain = make_domain(args.dimension, args.half_width, args.points)
    w = _build_weight(_make_weight_spec(args), domain)
    psi = _build_psi(
        PsiSpec(tag=args.psi, kappa=args.kappa, p=args.p, q=args.psi_q),
        args.dimension,
    )
    cfg = ExperimentConfig(
        name="norms",
        kind="local-estimate",
        operator="maximal",
        p=args.p,
        domain=DomainSpec(args.dimension, args.half_width, args.points),
    )
    family = _base_family(cfg, args.points)
    (fname, f), = build_function_family(
        FunctionFamilySpec(names=(args.function,)), domain, args.p, args.seed
    )
    res = gw_morrey_norm(f, w, args.p, psi, family)
    print(f"function={fname} norm={res.value:.12g}")
    print(
        f"witness: center={list(res.witness.center)} radius={res.witness.radius:.12g}"
    )
    return 0


def _cmd_weights(args) -> int:
    domain = make_domain(args.dimension, args.half_width, args.points)
    w = _build_weight(_make_weight_spec(args), domain)
    cfg = ExperimentConfig(
        name="weights",
        kind="local-estimate",
        operator="maximal",
        p=args.p,
        domain=DomainSpec(args.dimension, args.half_width, args.points),
    )
    family = _base_family(cfg, args.points)
    if args.q is None:
        est = ap_constant(w, args.p, family)
        label = f"class constant (single exponent p={args.p})"
    else:
        est = apq_constant(w, args.p, args.q, family)
        label = f"class constant (exponent pair p={args.p}, q={args.q})"
    print(f"{label}: {est.value:.12g}")
    if est.witness is not None:
        print(
            f"witness: center={list(est.witness.center)} "
            f"radius={est.witness.radius:.12g}"
        )
    return 0


def _cmd_operators(args) -> int:
    if args.check_kernel:
        rep = standard_kernel_check(kernel(args.check_kernel), seed=args.seed)
        print(
            f"kernel {args.check_kernel!r}: "
            f"{'PASS' if rep.passed else 'FAIL'} "
            f"(size={rep.size_ratio_max:.6g}, "
            f"smooth-x={rep.smooth_x_ratio_max:.6g}, "
            f"smooth-y={rep.smooth_y_ratio_max:.6g}, "
            f"samples={rep.samples}, bound={rep.size_constant})"
        )
        return 0 if rep.passed else 1
    domain = make_domain(args.dimension, args.half_width, args.points)
    (fname, f), = build_function_family(
        FunctionFamilySpec(names=(args.function,)), domain, max(args.p, 1.0), args.seed
    )
    point = tuple(args.point)
    if len(point) != args.dimension:
        print(
            f"error: --point needs {args.dimension} coordinates, got {len(point)}",
            file=sys.stderr,
        )
        return 2
    if args.operator in ("maximal", "fractional-maximal"):
        ladder = geometric_ladder(
            domain.cell_size, args.half_width, args.radii_steps
        )
        alpha = args.alpha if args.operator == "fractional-maximal" else 0.0
        value, radius = maximal_at(f, ladder, point, alpha)
        print(f"{args.operator}[{fname}]({list(point)}) = {value:.12g}")
        print(f"witness radius: {radius:.12g}")
    elif args.operator == "riesz-potential":
        if args.alpha is None:
            print("error: riesz-potential needs --alpha", file=sys.stderr)
            return 2
        value = riesz_at(f, args.alpha, point)
        print(f"{args.operator}[{fname}]({list(point)}) = {value:.12g}")
    elif args.operator == "cz-kernel":
        if not args.kernel:
            print(
                f"error: cz-kernel needs --kernel (registered: {kernel_names()})",
                file=sys.stderr,
            )
            return 2
        value = cz_at(kernel(args.kernel), f, point)
        print(f"{args.operator}:{args.kernel}[{fname}]({list(point)}) = {value:.12g}")
    else:
        print(f"error: unknown operator {args.operator!r}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morreykit",
        description="Numerical checks for weighted local averaging estimates.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="execute a TOML run spec")
    p_run.add_argument("config", help="path to the TOML run document")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.add_argument("--seed", type=int, default=None, help="seed override")
    p_run.add_argument("--threads", type=int, default=1, help="worker threads")
    p_run.add_argument(
        "--formats", default=None, help="comma-separated: json,csv (override)"
    )
    p_run.set_defaults(fn=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the built-in acceptance suite")
    p_verify.set_defaults(fn=_cmd_verify)

    p_norms = sub.add_parser("norms", help="one-shot Morrey norm")
    _grid_args(p_norms)
    p_norms.add_argument("--function", default="gaussian")
    p_norms.add_argument("--p", type=float, default=2.0)
    p_norms.add_argument("--weight", default="constant", choices=["constant", "power"])
    p_norms.add_argument("--beta", type=float, default=0.0)
    p_norms.add_argument("--psi", default="power")
    p_norms.add_argument("--kappa", type=float, default=0.5)
    p_norms.add_argument("--psi-q", type=float, default=None)
    p_norms.add_argument("--seed", type=int, default=0)
    p_norms.set_defaults(fn=_cmd_norms)

    p_weights = sub.add_parser("weights", help="one-shot weight-class constant")
    _grid_args(p_weights)
    p_weights.add_argument("--weight", default="power", choices=["constant", "power"])
    p_weights.add_argument("--beta", type=float, default=0.5)
    p_weights.add_argument("--p", type=float, default=2.0)
    p_weights.add_argument("--q", type=float, default=None)
    p_weights.set_defaults(fn=_cmd_weights)

    p_ops = sub.add_parser("operators", help="one-shot operator value at a point")
    _grid_args(p_ops)
    p_ops.add_argument(
        "--operator",
        default="maximal",
        choices=["maximal", "fractional-maximal", "riesz-potential", "cz-kernel"],
    )
    p_ops.add_argument("--function", default="ball-indicator")
    p_ops.add_argument("--point", type=float, nargs="+", default=[0.0])
    p_ops.add_argument("--alpha", type=float, default=None)
    p_ops.add_argument("--kernel", default=None)
    p_ops.add_argument("--radii-steps", type=int, default=48)
    p_ops.add_argument("--p", type=float, default=2.0)
    p_ops.add_argument("--seed", type=int, default=0)
    p_ops.add_argument(
        "--check-kernel", default=None, help="run the standard-bounds check instead"
    )
    p_ops.set_defaults(fn=_cmd_operators)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
