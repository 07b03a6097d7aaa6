"""
``exotic`` command line: construct quadrilateral groups, verify the exotic
circle, enumerate orbits and render figure-style SVG scenes.

Every run prints a JSON :class:`~exotic.models.reports.RunReport` to stdout.
Exit codes: 0 success, 1 other error, 2 failed check, 3 invalid input,
4 truncated orbit.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final, NoReturn

from exotic.constants import Branch
from exotic.exceptions import (
    CheckFailedError,
    DegenerateError,
    ExoticError,
    SchemaError,
    TruncatedOrbitError,
)
from exotic.geometry.moebius import GenCircle
from exotic.groups.lunchbox import closed_form_t0, cubic, find_t0, verify_exotic_tangency
from exotic.groups.orbit import (
    DEFAULT_CLOSURE_SAMPLE,
    approximate_limit_set,
    closure_check,
    distance_profile,
    enumerate_orbit,
)
from exotic.groups.quadgroup import (
    DEFAULT_ACCUMULATION_TOLERANCE,
    DEFAULT_BOUNDARY_DEPTH,
    DEFAULT_K_MAX,
    generator_set,
    solve_quadrilateral,
    summarize_limit_set,
    verify_accumulation,
)
from exotic.models.config import OrbitConfig
from exotic.models.generators import load_generator_file
from exotic.models.reports import CheckResult, RunReport
from exotic.render import Layer, Scene, Style, Viewport, write_svg

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from exotic.groups.orbit import OrbitSet
    from exotic.models.generators import GeneratorSet
    from exotic.models.quad import QuadGroupData

_logger = logging.getLogger(__name__)

DESCRIPTION: Final = "Quadrilateral reflection groups, exotic circles and limit sets."
LOG_FORMAT: Final = "%(levelname)s %(name)s: %(message)s"
FIGURE_SIZE_PX: Final = 1024
FIGURE_MARGIN: Final = 1.1
LIMIT_ROUND_TOLERANCE: Final = 1e-3
LIMIT_DEVIATION_BOUND: Final = 1e-2
_INPUT_ERROR_CODE: Final = SchemaError.exit_code

_GRAY: Final = Style(color="#808080", strokeWidth=1.5)
_LIMIT_POINTS: Final = Style(color="#000000", fill=True, pointRadius=0.75)
_ORBIT: Final = Style(color="#1f4e9c", strokeWidth=0.5)
_LIMIT_CIRCLE: Final = Style(color="#c0392b", strokeWidth=1.5)


def _orbit_config(args: argparse.Namespace) -> OrbitConfig:
    flags = {
        "max_depth": args.depth,
        "min_diameter": args.min_diameter,
        "dedup_epsilon": args.dedup_epsilon,
        "max_items": args.max_items,
        "workers": args.workers,
    }
    if args.config_from_env:
        return OrbitConfig.from_env(**flags)
    return OrbitConfig(**{k: v for k, v in flags.items() if v is not None})


def _quad(args: argparse.Namespace) -> QuadGroupData:
    return solve_quadrilateral(args.n, args.s, args.t, Branch(args.branch))


def _quad_inputs(args: argparse.Namespace) -> dict[str, Any]:
    return {"n": args.n, "s": args.s, "t": args.t, "branch": args.branch}


def _checks_only(report: Any) -> dict[str, CheckResult]:
    return dict(report.checks)


def cmd_solve_t0(args: argparse.Namespace) -> RunReport:
    root = find_t0()
    closed = closed_form_t0()
    report = verify_exotic_tangency(args.t)
    checks = _checks_only(report)
    checks["cubic_residual"] = CheckResult.within(cubic(root), 1e-10)
    return RunReport(
        command="solve-t0",
        inputs={"t": args.t},
        checks=checks,
        payload={
            "t0_bisection": root,
            "t0_closed_form": closed,
            "tangency": report.model_dump(mode="json", exclude={"checks"}),
        },
    )


def _quad_info(args: argparse.Namespace, d: QuadGroupData) -> RunReport:
    return RunReport(
        command="quad info",
        inputs=_quad_inputs(args),
        payload=d.model_dump(mode="json", by_alias=True),
    )


def _quad_exotic(args: argparse.Namespace, d: QuadGroupData) -> RunReport:
    report = verify_accumulation(
        d, args.k_max, args.tol, boundary_depth=args.boundary_depth, workers=args.workers
    )
    return RunReport(
        command="quad exotic",
        inputs={
            **_quad_inputs(args),
            "k_max": args.k_max,
            "tol": args.tol,
            "boundary_depth": args.boundary_depth,
        },
        checks=_checks_only(report),
        payload=report.model_dump(mode="json", exclude={"checks"}),
    )


def _quad_seed(d: QuadGroupData) -> list[GenCircle]:
    return [d.exotic_c] if d.exotic_c is not None else list(d.circles)


def _orbit_payload(orbit: OrbitSet) -> dict[str, Any]:
    return {
        "size": len(orbit),
        "truncated": orbit.truncated,
        "stats": orbit.stats.model_dump(),
    }


def _closure_checks(generators: GeneratorSet, orbit: OrbitSet) -> dict[str, CheckResult]:
    if orbit.truncated:
        return {}
    return _checks_only(closure_check(generators, orbit, DEFAULT_CLOSURE_SAMPLE))


def _quad_orbit(args: argparse.Namespace, d: QuadGroupData) -> RunReport:
    config = _orbit_config(args)
    generators = generator_set(d)
    orbit = enumerate_orbit(generators, _quad_seed(d), config)
    outputs: list[str] = []
    if args.out is not None:
        outputs.append(str(orbit.write_jsonl(args.out)))

    payload = _orbit_payload(orbit)
    checks = _closure_checks(generators, orbit)
    if d.limit_c is not None:
        profile = distance_profile(orbit, d.limit_c)
        payload["distance_to_limit_circle"] = profile
        checks["approaches_limit_circle"] = CheckResult.below(profile[-1][1], profile[0][1])
    return RunReport(
        command="quad orbit",
        inputs={**_quad_inputs(args), "config": config.echo()},
        outputs=outputs,
        checks=checks,
        payload=payload,
    )


def _quad_limitset(args: argparse.Namespace, d: QuadGroupData) -> RunReport:
    config = _orbit_config(args)
    cloud = approximate_limit_set(generator_set(d), config)
    summary = summarize_limit_set(d, cloud)
    checks: dict[str, CheckResult] = {}
    if cloud.size >= 3:
        checks = (
            {"round": CheckResult.within(summary.fit_deviation, LIMIT_ROUND_TOLERANCE)}
            if d.is_fuchsian
            else {
                "not_round": CheckResult.above(
                    summary.fit_deviation, LIMIT_DEVIATION_BOUND
                )
            }
        )
    return RunReport(
        command="quad limitset",
        inputs={**_quad_inputs(args), "config": config.echo()},
        checks=checks,
        payload=summary.model_dump(mode="json"),
    )


def _figure_viewport(d: QuadGroupData) -> Viewport:
    extent = max(abs(c.center) + c.radius for c in d.circles)
    return Viewport(center=0j, halfWidth=FIGURE_MARGIN * extent)


def _figure_paths(output: Path) -> tuple[Path, Path]:
    stem = output.with_suffix("")
    return Path(f"{stem}-a.svg"), Path(f"{stem}-b.svg")


def render_figures(
    d: QuadGroupData, config: OrbitConfig, output: Path
) -> tuple[list[str], dict[str, Any]]:
    """
    Writes ``<stem>-a.svg`` (boundary circles of the quadrilateral and the
    limit set) and ``<stem>-b.svg`` (orbit of the exotic circle and ``C′``).
    """
    generators = generator_set(d)
    viewport = _figure_viewport(d)
    cloud = approximate_limit_set(generators, config)
    orbit = enumerate_orbit(generators, _quad_seed(d), config)

    first = Scene(
        layers=(
            Layer.from_circles(d.circles, name="quadrilateral", style=_GRAY),
            Layer.from_points(cloud, name="limit-set", style=_LIMIT_POINTS),
        ),
        viewport=viewport,
        sizePx=FIGURE_SIZE_PX,
    )
    second_layers = [Layer.from_orbit(orbit, name="orbit", style=_ORBIT)]
    if d.limit_c is not None:
        second_layers.append(
            Layer.from_circles([d.limit_c], name="limit-circle", style=_LIMIT_CIRCLE)
        )
    second = Scene(layers=tuple(second_layers), viewport=viewport, sizePx=FIGURE_SIZE_PX)

    path_a, path_b = _figure_paths(output)
    stats_a = write_svg(first, path_a)
    stats_b = write_svg(second, path_b)
    payload = {
        "limit_set_points": cloud.size,
        "orbit": _orbit_payload(orbit),
        "svg_a": stats_a._asdict(),
        "svg_b": stats_b._asdict(),
    }
    return [str(path_a), str(path_b)], payload


def _quad_render(args: argparse.Namespace, d: QuadGroupData) -> RunReport:
    config = _orbit_config(args)
    outputs, payload = render_figures(d, config, Path(args.output))
    return RunReport(
        command="quad render",
        inputs={**_quad_inputs(args), "config": config.echo()},
        outputs=outputs,
        payload=payload,
    )


_QUAD_ACTIONS: Final[dict[str, Callable[[argparse.Namespace, QuadGroupData], RunReport]]] = {
    "info": _quad_info,
    "exotic": _quad_exotic,
    "orbit": _quad_orbit,
    "limitset": _quad_limitset,
    "render": _quad_render,
}


def cmd_quad(args: argparse.Namespace) -> RunReport:
    return _QUAD_ACTIONS[args.action](args, _quad(args))


def _parse_seed(text: str) -> GenCircle:
    try:
        A, b_re, b_im, D = (float(x) for x in text.split(","))
    except ValueError:
        msg = f"seed must be 'A,B_re,B_im,D', got {text!r}"
        raise argparse.ArgumentTypeError(msg) from None
    try:
        return GenCircle(A, complex(b_re, b_im), D)
    except DegenerateError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def cmd_orbit(args: argparse.Namespace) -> RunReport:
    generators, document = load_generator_file(args.generators)
    seed = args.seed or document.seed or GenCircle.unit_circle()
    config = _orbit_config(args)
    orbit = enumerate_orbit(generators, seed, config)

    outputs: list[str] = []
    if args.out is not None:
        outputs.append(str(orbit.write_jsonl(args.out)))
    if args.svg is not None:
        scene = Scene(
            layers=(Layer.from_orbit(orbit, style=_ORBIT),),
            viewport=Viewport(center=0j, halfWidth=args.half_width),
            sizePx=FIGURE_SIZE_PX,
        )
        write_svg(scene, args.svg)
        outputs.append(str(args.svg))

    return RunReport(
        command="orbit",
        inputs={
            "generators": str(args.generators),
            "labels": list(generators.labels),
            "seed": seed.to_dict(),
            "config": config.echo(),
        },
        outputs=outputs,
        checks=_closure_checks(generators, orbit),
        payload=_orbit_payload(orbit),
    )


def _write_report(report: RunReport, path: Path) -> str:
    path.write_text(report.to_json(), encoding="utf-8")
    return str(path)


def cmd_repro(args: argparse.Namespace) -> RunReport:
    """Re-runs the t₀ computation, the Fuchsian and exotic data and the figure pair."""
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = _orbit_config(args)
    checks: dict[str, CheckResult] = {}
    outputs: list[str] = []

    def collect(name: str, report: RunReport) -> None:
        checks.update({f"{name}.{k}": v for k, v in report.checks.items()})
        outputs.append(_write_report(report, out_dir / f"{name}.json"))

    collect("t0", cmd_solve_t0(argparse.Namespace(t=None)))

    fuchsian = solve_quadrilateral(3, 2.0, 2.0)
    fuchsian_args = argparse.Namespace(
        n=3, s=2.0, t=2.0, branch=str(Branch.OUTER), **_config_namespace(config)
    )
    collect("fuchsian", _quad_limitset(fuchsian_args, fuchsian))

    exotic = solve_quadrilateral(3, 2.0, 1.5)
    exotic_args = argparse.Namespace(
        n=3,
        s=2.0,
        t=1.5,
        branch=str(Branch.OUTER),
        k_max=DEFAULT_K_MAX,
        tol=DEFAULT_ACCUMULATION_TOLERANCE,
        boundary_depth=DEFAULT_BOUNDARY_DEPTH,
        **_config_namespace(config),
    )
    collect("exotic", _quad_exotic(exotic_args, exotic))

    figures, _ = render_figures(exotic, config, out_dir / "exotic.svg")
    outputs.extend(figures)
    return RunReport(
        command="repro",
        inputs={"out_dir": str(out_dir), "config": config.echo()},
        outputs=outputs,
        checks=checks,
    )


def _config_namespace(config: OrbitConfig) -> dict[str, Any]:
    return {
        "depth": config.max_depth,
        "min_diameter": config.min_diameter,
        "dedup_epsilon": config.dedup_epsilon,
        "max_items": config.max_items,
        "workers": config.workers,
        "config_from_env": False,
    }


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(_INPUT_ERROR_CODE, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )
    common.add_argument(
        "--config-from-env",
        action="store_true",
        help="read EXOTIC_* orbit settings from the environment",
    )
    common.add_argument("--json", type=Path, help="also write the run report to this file")
    return common


def _add_orbit_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("orbit enumeration")
    group.add_argument(
        "--depth",
        type=int,
        help=f"maximum word length (default {OrbitConfig.DEFAULT_MAX_DEPTH})",
    )
    group.add_argument(
        "--min-diameter",
        type=float,
        help=f"chordal pruning diameter (default {OrbitConfig.DEFAULT_MIN_DIAMETER})",
    )
    group.add_argument(
        "--dedup-epsilon",
        type=float,
        help=f"deduplication tolerance (default {OrbitConfig.DEFAULT_DEDUP_EPSILON})",
    )
    group.add_argument(
        "--max-items",
        type=int,
        help=f"retained circle budget (default {OrbitConfig.DEFAULT_MAX_ITEMS})",
    )
    group.add_argument("--workers", type=int, help="worker threads; never changes results")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="exotic", description=DESCRIPTION)
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser(
        "solve-t0", parents=[common], help="compute and certify the tangency parameter t₀"
    )
    solve.add_argument(
        "--t", type=float, help="verify at this parameter instead of the computed root"
    )
    solve.set_defaults(handler=cmd_solve_t0)

    quad = commands.add_parser("quad", help="quadrilateral reflection groups")
    quad.add_argument("--n", type=int, required=True)
    quad.add_argument("--s", type=float, required=True)
    quad.add_argument("--t", type=float, required=True)
    quad.add_argument("--branch", choices=[str(b) for b in Branch], default=str(Branch.OUTER))
    quad.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    quad.add_argument("--tol", type=float, default=DEFAULT_ACCUMULATION_TOLERANCE)
    quad.add_argument("--boundary-depth", type=int, default=DEFAULT_BOUNDARY_DEPTH)
    _add_orbit_flags(quad)
    quad.set_defaults(handler=cmd_quad)
    actions = quad.add_subparsers(dest="action", required=True)
    actions.add_parser("info", parents=[common], help="solved datum")
    actions.add_parser(
        "exotic", parents=[common], help="accumulation of the exotic circle on C′"
    )
    quad_orbit = actions.add_parser("orbit", parents=[common], help="orbit of the exotic circle")
    quad_orbit.add_argument("--out", type=Path, help="JSON lines output")
    actions.add_parser(
        "limitset", parents=[common], help="limit set approximation and roundness"
    )
    render = actions.add_parser("render", parents=[common], help="figure-style SVG pair")
    render.add_argument("-o", "--output", type=Path, default=Path("figure.svg"))

    orbit = commands.add_parser(
        "orbit", parents=[common], help="orbit of a circle under a generator file"
    )
    orbit.add_argument("generators", type=Path, metavar="GENS_FILE")
    orbit.add_argument("--seed", type=_parse_seed, help="seed circle as A,B_re,B_im,D")
    orbit.add_argument("--out", type=Path, help="JSON lines output")
    orbit.add_argument("--svg", type=Path, help="SVG output")
    orbit.add_argument(
        "--half-width", type=float, default=2.0, help="SVG viewport half-width around 0"
    )
    _add_orbit_flags(orbit)
    orbit.set_defaults(handler=cmd_orbit)

    repro = commands.add_parser(
        "repro", parents=[common], help="reproduce t₀, both datum reports and the figure pair"
    )
    repro.add_argument("--out-dir", type=Path, required=True)
    _add_orbit_flags(repro)
    repro.set_defaults(handler=cmd_repro)
    return parser


def _outcome(report: RunReport) -> ExoticError | None:
    if failed := [name for name, check in report.checks.items() if not check.passed]:
        return CheckFailedError(failed)
    if report.payload.get("truncated") or report.payload.get("orbit", {}).get("truncated"):
        return TruncatedOrbitError("orbit enumeration stopped at maxItems")
    return None


def run(argv: Sequence[str] | None = None) -> tuple[RunReport, argparse.Namespace]:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT)

    started = time.perf_counter()
    try:
        report: RunReport = args.handler(args)
        error = _outcome(report)
        code = 0 if error is None else ExoticError.exit_code_for(error)
        message = None if error is None else str(error)
    except ExoticError as e:
        _logger.exception("%s failed", args.command)
        report = RunReport(command=args.command)
        code, message = ExoticError.exit_code_for(e), str(e)
    except ValueError as e:
        _logger.exception("%s failed", args.command)
        report = RunReport(command=args.command)
        code, message = _INPUT_ERROR_CODE, str(e)
    except Exception as e:  # noqa: BLE001
        _logger.exception("%s failed", args.command)
        report = RunReport(command=args.command)
        code, message = 1, str(e)

    report = report.model_copy(
        update={
            "wall_time": time.perf_counter() - started,
            "exit_code": code,
            "error": message,
        }
    )
    return report, args


def main(argv: Sequence[str] | None = None) -> int:
    report, args = run(argv)
    text = report.to_json()
    print(text)
    if args.json is not None:
        outputs = [*report.outputs, str(args.json)]
        written = report.model_copy(update={"outputs": outputs})
        args.json.write_text(written.to_json(), encoding="utf-8")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
