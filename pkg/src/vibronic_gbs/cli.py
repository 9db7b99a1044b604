from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any

from .config import RunConfig, load_run_config, parse_float_list
from .linelist import write_curve, write_line_list, write_sweep
from .models import InputError, NumericalError, Order, ValidationError
from .molfile import export_dataset, list_datasets, molecule_text, resolve_molecule, validate_document
from .molecule import log_validation
from .spectrum import (
    BROADENING_MODES,
    EXACT_METHODS,
    SpectralProfile,
    broaden,
    condon_profile,
    device_plan,
    error_sweep,
    exact_profile,
    noncondon_profile,
    sampled_profile,
    total_mass,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibronic-gbs",
        description="Simulate Herzberg-Teller vibronic spectra with Gaussian boson sampling devices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration; flags take precedence over it")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")

    run = argparse.ArgumentParser(add_help=False, parents=[common])
    run.add_argument("--molecule", required=True, help="molecule YAML file or bundled dataset name")
    run.add_argument("--order", choices=[order.value for order in Order], help="dipole expansion order")
    run.add_argument("--cutoff", type=int, help="maximum photon number per mode")
    run.add_argument("--axes", help="comma-separated dipole axes, e.g. x,y (default: all present)")

    spectrum_parser = sub.add_parser("spectrum", parents=[run], help="Compute a line list")
    spectrum_parser.add_argument("--tau", type=float, help="finite-difference step of the device combination")
    spectrum_parser.add_argument("--exact", action="store_true", help="evaluate the profile exactly instead")
    spectrum_parser.add_argument("--exact-method", choices=EXACT_METHODS, help="exact evaluator (default: auto)")
    spectrum_parser.add_argument("--broaden-width", type=float, help="Gaussian width in cm^-1")
    spectrum_parser.add_argument("--broaden-mode", choices=BROADENING_MODES, help="width is sigma or FWHM")
    spectrum_parser.add_argument("--grid-step", type=float, help="broadened grid spacing in cm^-1")
    spectrum_parser.add_argument("--out", help="line list CSV path")
    spectrum_parser.add_argument("--broadened-out", help="broadened curve CSV path (needs --broaden-width)")

    sweep_parser = sub.add_parser("error-sweep", parents=[run], help="L1 error of the combination against tau")
    sweep_parser.add_argument("--taus", help="comma-separated tau values, at least three")
    sweep_parser.add_argument("--exact-method", choices=EXACT_METHODS, help="exact evaluator (default: auto)")
    sweep_parser.add_argument("--out", help="sweep CSV path")

    sample_parser = sub.add_parser("sample", parents=[run], help="Estimate the profile from sampled patterns")
    sample_parser.add_argument("--tau", type=float)
    sample_parser.add_argument("--shots", type=int, help="detector patterns drawn per device")
    sample_parser.add_argument("--seed", type=int, help="root seed of the per-device random streams")
    sample_parser.add_argument("--out", help="sampled line list CSV path")

    devices_parser = sub.add_parser("devices", parents=[run], help="Show squeezers, interferometer and weights")
    devices_parser.add_argument("--tau", type=float)

    validate_parser = sub.add_parser("validate", parents=[common], help="Validate a molecule file")
    validate_parser.add_argument("--molecule", required=True)

    datasets_parser = sub.add_parser("datasets", parents=[common], help="Bundled molecules")
    datasets_sub = datasets_parser.add_subparsers(dest="datasets_command", required=True)
    datasets_sub.add_parser("list", help="List bundled datasets")
    datasets_export = datasets_sub.add_parser("export", help="Write bundled datasets as YAML files")
    datasets_export.add_argument("names", nargs="*", help="dataset names (default: all)")
    datasets_export.add_argument("--out-dir", default=".")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        return _dispatch(args)
    except ValidationError as exc:
        return _fail(EXIT_INPUT, str(exc), issues=exc.issues)
    except InputError as exc:
        return _fail(EXIT_INPUT, str(exc))
    except NumericalError as exc:
        return _fail(EXIT_NUMERICAL, str(exc))


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "validate":
        spec, warnings = validate_document(molecule_text(args.molecule))
        log_validation(spec, warnings)
        _emit({"molecule": spec.name, "valid": True, "modes": spec.modes, "axes": list(spec.axes), "warnings": warnings})
        return EXIT_OK

    if args.command == "datasets":
        if args.datasets_command == "list":
            _emit({"datasets": list_datasets()})
            return EXIT_OK
        if args.datasets_command == "export":
            paths = [str(export_dataset(name, args.out_dir)) for name in (args.names or list_datasets())]
            _emit({"status": "ok", "paths": paths})
            return EXIT_OK

    config = _run_config(args)
    spec = resolve_molecule(args.molecule)
    logger.info("%s on %s with %s", args.command, spec.name, config)

    if args.command == "spectrum":
        profile = _spectrum(spec, config, args.exact)
        payload: dict[str, Any] = _profile_summary(profile)
        if args.out:
            payload["out"] = str(write_line_list(profile, args.out))
        if args.broadened_out and config.broaden_width is None:
            raise InputError("--broadened-out needs --broaden-width")
        if config.broaden_width is not None:
            curve = broaden(profile, config.broaden_width, config.grid_step, config.broaden_mode)
            payload["broadening"] = {"sigma": curve.sigma, "mode": curve.mode, "clamped_mass": curve.clamped_mass}
            if args.broadened_out:
                payload["broadened_out"] = str(write_curve(curve, args.broadened_out))
        _emit(payload)
        return EXIT_OK

    if args.command == "error-sweep":
        sweep = error_sweep(spec, config.axes, config.order, config.taus, config.cutoff, config.exact_method)
        payload = {
            "molecule": spec.name,
            "taus": sweep.taus.tolist(),
            "errors": sweep.errors.tolist(),
            "slope": sweep.slope,
        }
        if args.out:
            payload["out"] = str(write_sweep(sweep, args.out))
        _emit(payload)
        return EXIT_OK

    if args.command == "sample":
        profile, result = sampled_profile(
            spec, config.axes, config.tau, config.order, config.cutoff, config.shots, config.seed
        )
        payload = _profile_summary(profile)
        payload.update({"shots": result.shots, "seed": result.seed, "tv_distance": result.tv_distance})
        if args.out:
            payload["out"] = str(write_line_list(profile, args.out))
        _emit(payload)
        return EXIT_OK

    if args.command == "devices":
        plan = device_plan(spec, config.axes, config.tau, config.order)
        _emit({"molecule": spec.name, "tau": config.tau, "devices": [setting.to_mapping() for setting in plan]})
        return EXIT_OK

    return EXIT_INPUT


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, Any] = {
        "order": args.order,
        "cutoff": args.cutoff,
        "axes": args.axes,
        "tau": getattr(args, "tau", None),
        "shots": getattr(args, "shots", None),
        "seed": getattr(args, "seed", None),
        "broaden_width": getattr(args, "broaden_width", None),
        "broaden_mode": getattr(args, "broaden_mode", None),
        "grid_step": getattr(args, "grid_step", None),
        "exact_method": getattr(args, "exact_method", None),
    }
    taus = getattr(args, "taus", None)
    if taus is not None:
        overrides["taus"] = parse_float_list(taus)
    return load_run_config(args.config).merged(overrides)


def _spectrum(spec, config: RunConfig, exact: bool) -> SpectralProfile:
    if config.order is Order.CONDON:
        return condon_profile(spec, config.cutoff)
    if exact:
        return exact_profile(spec, config.axes, config.order, config.cutoff, config.exact_method)
    return noncondon_profile(spec, config.axes, config.tau, config.order, config.cutoff)


def _profile_summary(profile: SpectralProfile) -> dict[str, Any]:
    return {
        "molecule": profile.molecule,
        "kind": profile.kind,
        "order": profile.order.value,
        "axes": list(profile.axes),
        "cutoff": profile.cutoff,
        "tau": profile.tau,
        "total_mass": total_mass(profile),
        "top_lines": [{"frequency_cm1": f, "probability": p} for f, p in profile.top_lines()],
    }


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def _emit(payload: dict[str, Any]) -> None:
    print(json.dumps(payload))


def _fail(code: int, message: str, issues: list[str] | None = None) -> int:
    print(f"error: {message}", file=sys.stderr)
    payload: dict[str, Any] = {"error": message}
    if issues is not None:
        payload["issues"] = issues
    _emit(payload)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
