"""Command-line entry point: estimate curves and run experiments, writing CSV.

Exit status is 0 on success, 2 for configuration or input errors and 3 for
numerical failures; errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import theory
from .baseline import bandwidth_rule
from .errors import ConfigurationError, MomentDensityError, NumericError
from .estimators import EstimateCurve
from .models import (
    EXCESS_LIFE,
    LENGTH_BIASED,
    Sample,
    builtin_scenario,
    direct_model,
    excess_life_model,
    length_biased_model,
)
from .registry import evaluate, get_estimator, resolve_weight, truth
from .simulation import (
    McConfig,
    normality_experiment,
    rate_fit,
    run_mc,
    sample_scenario,
)
from .smoothing import alpha_global, parse_alpha_rule

OUTPUT_DIR_ENV = "MOMENTDENSITY_OUTPUT_DIR"
FIGURE_GRID = (0.025, 5.0, 200)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _int_list(value):
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    if isinstance(value, (int, float)):
        return [int(value)]
    try:
        return [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {value!r} as a list of integers") from None


def _float_list(value):
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    try:
        return [float(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {value!r} as a list of numbers") from None


def _grid(spec, default=FIGURE_GRID):
    if spec is None:
        lo, hi, count = default
    else:
        parts = _float_list(spec)
        if len(parts) != 3:
            raise ConfigurationError("--grid takes min,max,count")
        lo, hi, count = parts[0], parts[1], int(parts[2])
    if not lo > 0 or not hi > lo or count < 2:
        raise ConfigurationError("grid needs 0 < min < max and count >= 2")
    return np.linspace(lo, hi, int(count))


def _beta(args):
    beta = float(args.bandwidth_exp)
    bandwidth_rule(1, beta)
    return beta


def _data_model(args):
    kind = args.model or LENGTH_BIASED
    W = args.total_weight
    if kind == LENGTH_BIASED:
        return length_biased_model(W)
    if kind == EXCESS_LIFE:
        return excess_life_model(W)
    if kind == "direct":
        return direct_model()
    raise ConfigurationError(f"unknown --model {kind!r}")


def _load_sample(args, default_n):
    """Sample plus (scenario or None, model) from --data or --scenario."""
    if args.data:
        if args.scenario:
            raise ConfigurationError("give either --data or --scenario, not both")
        return Sample.from_file(args.data), None, _data_model(args)
    if not args.scenario:
        raise ConfigurationError("a --scenario name or a --data file is required")
    scenario, model = builtin_scenario(args.scenario)
    n = _int_list(args.n)[0] if args.n is not None else default_n
    return sample_scenario(args.scenario, n, args.seed), scenario, model


def _alphas(rule, n, xs, scenario):
    if rule.is_local and scenario is None:
        raise ConfigurationError("local alpha rules need a truth scenario")
    return np.array([rule.resolve(n, x, scenario, scenario.W if scenario else None) for x in xs])


def _curve(name, sample, scenario, model, rule, xs, weight_mode, beta):
    info = get_estimator(name, model)
    weight = resolve_weight(info, sample, model, weight_mode)
    alphas = _alphas(rule, sample.n, xs, scenario) if info.kernel == "gamma" else np.nan
    h = bandwidth_rule(sample.n, beta) if info.kernel == "gaussian" else None
    values = evaluate(info, sample, model, weight, alphas, xs, h)
    return info, EstimateCurve(xs, values, alphas, name)


def cmd_estimate(args, survival=False):
    default = "survival" if survival else "star"
    name = args.estimator or default
    sample, scenario, model = _load_sample(args, 300)
    xs = _grid(args.grid)
    rule = parse_alpha_rule(args.alpha)
    info, curve = _curve(name, sample, scenario, model, rule, xs, args.weight or "known", _beta(args))
    values = curve.values
    if survival and args.clamp_survival:
        values = np.clip(values, 0.0, 1.0)
    header = ["x", "alpha", "estimate"]
    cols = [curve.grid, curve.alphas, values]
    if scenario is not None:
        header.append("truth")
        cols.append(truth(info, scenario, model, xs))
    return _csv_text(header, zip(*cols)), None


def _mc_config(args, estimator_default, x_default, n_default, replicates_default):
    if not args.scenario:
        raise ConfigurationError("a --scenario name is required")
    scenario, model = builtin_scenario(args.scenario)
    name = args.estimator or (estimator_default if model.kind == LENGTH_BIASED else "survival")
    return McConfig(
        scenario=args.scenario,
        estimator=name,
        n_grid=_int_list(args.n if args.n is not None else n_default),
        replicates=int(args.replicates or replicates_default),
        x_points=_float_list(args.x if args.x is not None else x_default),
        alpha_rule=parse_alpha_rule(args.alpha),
        root_seed=int(args.seed),
        weight=args.weight or "known",
        bandwidth_exp=_beta(args),
        workers=int(args.workers),
    )


_MC_HEADER = ["n", "x", "alpha", "truth", "mean", "bias", "variance", "mse",
              "bias_se", "mse_se", "predicted_mse"]


def _mc_rows(result):
    return [
        (c.n, c.x, c.alpha, c.truth, c.mean, c.bias, c.variance, c.mse,
         c.bias_se, c.mse_se, c.predicted_mse)
        for c in result.cells
    ]


def cmd_mse(args):
    config = _mc_config(args, "star", "1", "400,1600", 500)
    return _csv_text(_MC_HEADER, _mc_rows(run_mc(config))), None


def cmd_rate(args):
    config = _mc_config(args, "star", "1", "400,1600,6400,25600", 2000)
    if len(config.n_grid) < 3:
        raise ConfigurationError("rate fitting needs at least three sample sizes")
    result = run_mc(config)
    lines = []
    for x in config.x_points:
        ns, mses = result.mse_curve(x)
        fit = rate_fit(ns, mses)
        lines.append(
            f"# rate x={_fmt(x)} slope={_fmt(fit.slope)} intercept={_fmt(fit.intercept)} "
            f"r2={_fmt(fit.r2)} target={_fmt(theory.RATE_EXPONENT)}"
        )
    return _csv_text(_MC_HEADER, _mc_rows(result)), "\n".join(lines)


def cmd_normality(args):
    config = _mc_config(args, "star", "1", "2000", 2000)
    centering = args.centering
    scaling = args.scaling
    res = normality_experiment(config, centering, scaling, args.subtract_limit_mean)
    scenario = builtin_scenario(config.scenario)[0]
    alpha = config.alpha_rule.resolve(config.n_grid[0], config.x_points[0], scenario)
    header = ["estimator", "n", "x", "alpha", "centering", "scaling", "replicates",
              "ks_distance", "ks_band_5pct", "mean", "std"]
    row = (config.estimator, config.n_grid[0], config.x_points[0], alpha, centering, scaling,
           res.replicate_count, res.ks_distance, 1.36 / math.sqrt(res.replicate_count),
           res.mean, res.std)
    return _csv_text(header, [row]), None


def cmd_compare(args):
    sample, scenario, model = _load_sample(args, 300)
    xs = _grid(args.grid)
    rule = parse_alpha_rule(args.alpha)
    beta = _beta(args)
    if args.baseline != "jones":
        raise ConfigurationError(f"unknown baseline {args.baseline!r}")
    if model.kind == LENGTH_BIASED:
        moment, kernel = "star", "jones"
    elif model.kind == EXCESS_LIFE:
        moment, kernel = "survival", "jones-survival"
    else:
        raise ConfigurationError("compare needs a length-biased or excess-life model")
    weight = args.weight or "known"
    info, m_curve = _curve(moment, sample, scenario, model, rule, xs, weight, beta)
    _, k_curve = _curve(kernel, sample, scenario, model, rule, xs, weight, beta)
    header = ["x", "alpha", "moment", "kernel"]
    cols = [xs, m_curve.alphas, m_curve.values, k_curve.values]
    if scenario is not None:
        header.insert(1, "truth")
        cols.insert(1, truth(info, scenario, model, xs))
    return _csv_text(header, zip(*cols)), None


def figure_curves(name, n, seed, alpha_text="global:2/5", beta=0.2, grid=None, weight=None):
    """Truth, moment and kernel curves for the two simulated figures.

    By default the moment estimator uses the known ``W`` and the length-biased
    kernel estimator the harmonic plug-in; ``weight`` forces one mode on both.
    """
    scenario, model = builtin_scenario(name)
    sample = sample_scenario(name, n, seed)
    xs = _grid(grid)
    rule = parse_alpha_rule(alpha_text)
    if model.kind == LENGTH_BIASED:
        moment, kernel = "star", "jones"
        modes = (weight or "known", weight or "plugin")
    else:
        moment, kernel = "survival", "jones-survival"
        modes = (weight or "known", weight or "known")
    info, m_curve = _curve(moment, sample, scenario, model, rule, xs, modes[0], beta)
    _, k_curve = _curve(kernel, sample, scenario, model, rule, xs, modes[1], beta)
    return xs, truth(info, scenario, model, xs), m_curve, k_curve


def _figure(args, name, n, labels):
    n = _int_list(args.n)[0] if args.n is not None else n
    xs, true, m_curve, k_curve = figure_curves(
        name, n, args.seed, args.alpha, _beta(args), args.grid, args.weight
    )
    summary = f"# {name} n={n} alpha={_fmt(m_curve.alphas[0])} h={_fmt(bandwidth_rule(n, _beta(args)))}"
    return _csv_text(["x", *labels], zip(xs, true, m_curve.values, k_curve.values)), summary


def cmd_figure1(args):
    return _figure(args, "lb-exp2", 300, ["f_true", "f_star", "f_jones"])


def cmd_figure2(args):
    return _figure(args, "excess-gamma22", 400, ["S_true", "S_alpha", "S_jones"])


COMMANDS = {
    "estimate": (lambda a: cmd_estimate(a, False), "density curve from a data file or scenario sample"),
    "survival": (lambda a: cmd_estimate(a, True), "survival curve for excess-life data"),
    "mse": (cmd_mse, "Monte Carlo bias/variance/MSE table"),
    "rate": (cmd_rate, "Monte Carlo MSE over an n-grid with a log-log slope fit"),
    "normality": (cmd_normality, "KS distance of standardized replicates to N(0, 1)"),
    "compare": (cmd_compare, "moment and kernel estimates on one shared sample"),
    "figure1": (cmd_figure1, "length-biased G(2, 1/2) sample, n = 300"),
    "figure2": (cmd_figure2, "excess-life G(2, 2) sample, n = 400"),
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--scenario", help="built-in scenario: lb-exp2 or excess-gamma22")
    common.add_argument("--data", help="observations, one positive number per line")
    common.add_argument("--model", choices=[LENGTH_BIASED, EXCESS_LIFE, "direct"])
    common.add_argument("--total-weight", type=float, dest="total_weight")
    common.add_argument("--estimator")
    common.add_argument("--alpha", default="global:2/5",
                        help="fixed:<v> | global:<delta> | local-density:<delta> | local-survival:<delta>")
    common.add_argument("--baseline", default="jones")
    common.add_argument("--bandwidth-exp", dest="bandwidth_exp", default=0.2, type=float)
    common.add_argument("--grid", help="min,max,count")
    common.add_argument("--n", help="sample size, or comma-separated sizes")
    common.add_argument("--x", help="comma-separated evaluation points")
    common.add_argument("--replicates", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--weight", choices=["known", "plugin"])
    common.add_argument("--clamp-survival", dest="clamp_survival", action="store_true")
    common.add_argument("--centering", default="exact-mean", choices=["exact-mean", "true-value"])
    common.add_argument("--scaling", default="exact-variance",
                        choices=["exact-variance", "theory-variance", "rate-only"])
    common.add_argument("--subtract-limit-mean", dest="subtract_limit_mean", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--output", "-o", help="CSV path (default: stdout)")

    parser = _Parser(prog="momentdensity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    subparsers = {}
    for name, (_, help_text) in COMMANDS.items():
        subparsers[name] = sub.add_parser(name, parents=[common], help=help_text)
    return parser, subparsers


def parse_args(argv):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigurationError("a command is required: " + ", ".join(COMMANDS))
    if args.config:
        try:
            with open(args.config) as fh:
                values = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigurationError("config file must hold a JSON object")
        known = {a.dest for a in subparsers[args.command]._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        subparsers[args.command].set_defaults(**{k: v for k, v in values.items()})
        args = parser.parse_args(argv)
    return args


def _output_path(args):
    if args.output:
        return args.output
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        return os.path.join(directory, f"{args.command}.csv")
    return None


def _report_error(kind, exc):
    payload = {"status": "error", "kind": kind, "message": str(exc)}
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics:
        payload["diagnostics"] = {k: _fmt(v) if not isinstance(v, (list, tuple)) else list(map(_fmt, v))
                                  for k, v in diagnostics.items()}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def run(argv=None):
    """Execute one command and return its exit status."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        text, summary = COMMANDS[args.command][0](args)
        path = _output_path(args)
        if path is None:
            sys.stdout.write(text)
            if summary:
                print(summary, file=sys.stderr)
        else:
            with open(path, "w", newline="") as fh:
                fh.write(text)
            if summary:
                print(summary)
        return 0
    except NumericError as exc:
        _report_error("numeric", exc)
        return 3
    except (MomentDensityError, ValueError, OSError) as exc:
        _report_error("configuration", exc)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
