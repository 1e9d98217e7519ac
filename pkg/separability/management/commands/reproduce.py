import csv

from django.core.management.base import CommandError

from separability.management.commands._options import EXIT_DEVIATION, SeparabilityCommand, usage_error
from separability.services.errors import BadConfig
from separability.services.reports import format_table
from separability.services.reproduce import reproduce

CSV_HEADER = ["example", "key", "label", "paper", "computed", "delta", "tol", "status"]


def parse_examples(text: str) -> list[int] | None:
    if text == "all":
        return None
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise usage_error(f"--example expects 1..6, a comma list or 'all', got {text!r}")


def status(row) -> str:
    if row.ok is None:
        return "reference"
    if row.informational:
        return "info" if row.ok else "info-mismatch"
    return "ok" if row.ok else "DEVIATION"


class Command(SeparabilityCommand):
    help = "Recompute the published reference numbers and compare"
    command_name = "reproduce"

    def add_arguments(self, parser):
        parser.add_argument("--example", default="all", help="1..6, a comma list, or all")
        parser.add_argument("--tol", type=float, default=None, help="Scan tolerance (default: SCAN_TOL)")
        parser.add_argument("--values", default=None, help="Reference value file (default: REFERENCE_VALUES setting)")
        parser.add_argument("--threads", type=int, default=None, help="Worker cap (default: THREADS setting)")
        parser.add_argument("--csv", action="store_true", help="Emit CSV rows instead of a table")
        parser.add_argument("--json", action="store_true", help="Emit the run report as JSON")

    def execute_run(self, report, options):
        try:
            result = reproduce(parse_examples(options["example"]), path=options["values"], tol=options["tol"],
                               threads=options["threads"])
        except BadConfig as exc:
            raise usage_error(str(exc))
        report.reproduction.extend(result.rows)
        report.orderings.extend(result.orderings)
        report.warnings.extend(result.warnings)
        self.deviations = result.deviations

    def render_human(self, report, options):
        if options["csv"]:
            writer = csv.writer(self.stdout, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in report.reproduction:
                writer.writerow([r.example, r.key, r.label, repr(r.paper),
                                 "" if r.computed is None else repr(r.computed),
                                 "" if r.delta is None else repr(r.delta), repr(r.tol), status(r)])
            return

        rows = [[r.example, r.key, r.paper, r.computed, r.delta, r.tol, status(r)] for r in report.reproduction]
        self.stdout.write(format_table(["ex", "check", "paper", "computed", "|delta|", "tol", "status"], rows))
        if report.orderings:
            self.stdout.write("")
            for o in report.orderings:
                mark = "ok" if o.ok else "FAILS"
                self.stdout.write(f"ordering {o.left} {o.relation} {o.right}: "
                                  f"{o.left_value:.6g} {o.relation} {o.right_value:.6g}  {mark}")
        for w in report.warnings:
            self.stdout.write(self.style.WARNING(f"warning: {w}"))

    def after_output(self, report, options):
        if self.deviations:
            raise CommandError("Reproduction deviations:\n  " + "\n  ".join(self.deviations),
                               returncode=EXIT_DEVIATION)
