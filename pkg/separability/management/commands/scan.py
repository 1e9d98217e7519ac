import csv
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from separability.conf import setting
from separability.management.commands._options import (
    SeparabilityCommand, add_output_arguments, add_param_arguments, bipartite_view, resolve_params, usage_error,
)
from separability.services.criteria import BIPARTITE_CRITERIA, threshold_scan
from separability.services.errors import BadParams
from separability.services.multipartite import MULTIPARTITE_CRITERIA, resolve_criterion
from separability.services.reports import format_table, state_digest
from separability.services.states import state_family

CSV_HEADER = ["family", "param", "criterion", "lhs", "rhs", "margin", "verdict"]


def parse_fixed(items: list[str]) -> dict:
    fixed = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise usage_error(f"--fixed expects name=value, got {item!r}")
        try:
            fixed[name.strip()] = float(value)
        except ValueError:
            raise usage_error(f"--fixed value for {name.strip()} is not a number: {value!r}")
    return fixed


class Command(SeparabilityCommand):
    help = "Bisect a one-parameter state family for the parameter where a criterion's verdict flips"
    command_name = "scan"

    def add_arguments(self, parser):
        parser.add_argument("--family", required=True, help="Builtin name, e.g. example1, tiles_noise, w_noise")
        parser.add_argument("--fixed", action="append", default=[], help="Hold a parameter fixed: name=value")
        parser.add_argument("--lo", type=float, default=None, help="Lower end of the bracket (default: range start)")
        parser.add_argument("--hi", type=float, default=None, help="Upper end of the bracket (default: range end)")
        parser.add_argument("--tol", type=float, default=None, help="Bracket width to stop at (default: SCAN_TOL)")
        parser.add_argument("--criterion", default="thm1",
                            help=f"One of {', '.join(BIPARTITE_CRITERIA + MULTIPARTITE_CRITERIA[:1])}")
        add_param_arguments(parser)
        parser.add_argument("--alpha", type=float, default=None)
        parser.add_argument("--beta", type=float, default=None)
        parser.add_argument("--l", type=int, default=None)
        parser.add_argument("--grid", type=int, default=0, help="Also evaluate the criterion on N evenly spaced points")
        parser.add_argument("--csv", action="store_true", help="Emit CSV rows instead of a table")
        add_output_arguments(parser)

    def execute_run(self, report, options):
        name = options["criterion"]
        if name not in BIPARTITE_CRITERIA + ("bisep",):
            raise usage_error(f"Unknown or unsupported scan criterion {name!r}")
        if options["auto_params"]:
            raise usage_error("--auto-params is not supported for scans; pass --mu and --nu")
        if options["grid"] < 0:
            raise usage_error("--grid must be non-negative")

        family = state_family(options["family"], **parse_fixed(options["fixed"]))
        lo = family.param.lo if options["lo"] is None else options["lo"]
        hi = family.param.hi if options["hi"] is None else options["hi"]

        params = resolve_params(options)
        if name in ("thm1", "bisep") and params is None:
            raise usage_error(f"{name} needs --mu and --nu")
        alpha, beta, l = options["alpha"], options["beta"], options["l"]
        if params is not None:
            alpha = params.mu[0] if alpha is None else alpha
            beta = params.nu[0] if beta is None else beta
            l = params.n if l is None else l
        try:
            crit = resolve_criterion(name, params=params, alpha=alpha, beta=beta, l=l, tau=options["tau"])
        except BadParams as exc:
            raise usage_error(str(exc))

        cut = options["cut"]
        criterion = crit if name == "bisep" else (lambda rho: crit(bipartite_view(rho, cut)))
        result = threshold_scan(family, criterion, lo, hi, options["tol"])
        report.thresholds.append(result)
        report.digest = state_digest(None, {"family": family.label, "criterion": name, "lo": lo, "hi": hi,
                                            "params": params.as_dict() if params else None})

        points = [lo, result.bracket[0], result.bracket[1], hi]
        if options["grid"]:
            points.extend(np.linspace(lo, hi, options["grid"]).tolist())
        points = sorted(set(points))
        with ThreadPoolExecutor(max_workers=max(1, int(setting("THREADS")))) as pool:
            evaluated = list(pool.map(lambda t: criterion(family(t)), points))
        self.samples = list(zip(points, evaluated))
        report.reports.extend(evaluated)

    def render_human(self, report, options):
        if options["csv"]:
            self.write_csv(report)
            return
        result = report.thresholds[0]
        self.stdout.write(f"family     {result.family}")
        self.stdout.write(f"criterion  {result.criterion}")
        self.stdout.write(f"threshold  {result.threshold:.6g}  (entangled {result.direction} of it)")
        self.stdout.write(f"bracket    [{result.bracket[0]:.9g}, {result.bracket[1]:.9g}] after "
                          f"{result.iterations} bisections")
        rows = [[t, r.lhs, r.rhs, r.margin, r.verdict.value] for t, r in self.samples]
        self.stdout.write(format_table(["param", "lhs", "rhs", "margin", "verdict"], rows))

    def write_csv(self, report):
        result = report.thresholds[0]
        writer = csv.writer(self.stdout, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for t, r in self.samples:
            writer.writerow([result.family, repr(float(t)), r.criterion, repr(float(r.lhs)), repr(float(r.rhs)),
                             repr(float(r.margin)), r.verdict.value])
