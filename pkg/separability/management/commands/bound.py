from separability.management.commands._options import (
    SeparabilityCommand, add_output_arguments, add_param_arguments, add_state_argument, bipartite_view,
    load_state, resolve_params, usage_error,
)
from separability.services.measures import concurrence_lower_bound, cren_lower_bound
from separability.services.multipartite import gme_concurrence_lower_bound
from separability.services.reports import format_table, state_digest

MEASURES = {
    "concurrence": concurrence_lower_bound,
    "cren": cren_lower_bound,
    "gme": gme_concurrence_lower_bound,
}


class Command(SeparabilityCommand):
    help = "Lower bounds on concurrence, CREN and tripartite GME concurrence"
    command_name = "bound"

    def add_arguments(self, parser):
        add_state_argument(parser)
        parser.add_argument("--measure", default="concurrence,cren", help=f"Comma list from {', '.join(MEASURES)}")
        add_param_arguments(parser)
        add_output_arguments(parser)

    def execute_run(self, report, options):
        names = [m.strip() for m in options["measure"].split(",") if m.strip()]
        unknown = [m for m in names if m not in MEASURES]
        if not names or unknown:
            raise usage_error(f"Unknown measure {unknown or names}; choose from {', '.join(MEASURES)}")

        rho = load_state(options["state"])
        params = resolve_params(options, rho, report)
        if params is None:
            raise usage_error("Bounds need --mu and --nu (or --auto-params)")

        report.digest = state_digest(rho, {"measures": names, "params": params.as_dict()})
        for name in names:
            target = rho if name == "gme" else bipartite_view(rho, options["cut"])
            report.reports.append(MEASURES[name](target, params))

    def render_human(self, report, options):
        rows = [[r.measure, r.bound, r.d, r.q_norm, r.offset, "vacuous" if r.vacuous else ""]
                for r in report.reports]
        self.stdout.write(format_table(["measure", "bound", "d", "q_norm", "offset", "note"], rows))
