from separability.management.commands._options import (
    SeparabilityCommand, add_output_arguments, add_param_arguments, add_state_argument, bipartite_view,
    load_state, resolve_params, usage_error,
)
from separability.services.criteria import BIPARTITE_CRITERIA, parse_vector
from separability.services.multipartite import MULTIPARTITE_CRITERIA, MuFamily, resolve_criterion
from separability.services.reports import format_table, state_digest

NEEDS_PARAMS = {"thm1", "bisep"}
NEEDS_SCALARS = {"shi", "sun"}


def parse_mu_family(text: str | None, q: int, n_parties: int, fallback: list[float] | None) -> MuFamily:
    """``"1,2;1;1"`` gives one vector per party q..n; without it every party uses ``fallback``."""
    if text:
        vectors = [parse_vector(chunk) for chunk in text.split(";")]
    elif fallback is not None:
        vectors = [fallback] * (n_parties - q + 1)
    else:
        raise usage_error("fullsep needs --qr-mu or --mu")
    return MuFamily(tuple(vectors), q=q)


class Command(SeparabilityCommand):
    help = "Evaluate separability criteria on one state"
    command_name = "detect"

    def add_arguments(self, parser):
        add_state_argument(parser)
        parser.add_argument("--criterion", default="thm1",
                            help=f"Comma list from {', '.join(BIPARTITE_CRITERIA + MULTIPARTITE_CRITERIA)}")
        add_param_arguments(parser)
        parser.add_argument("--alpha", type=float, default=None, help="Scalar for shi/sun (default: first mu entry)")
        parser.add_argument("--beta", type=float, default=None, help="Scalar for shi/sun (default: first nu entry)")
        parser.add_argument("--l", type=int, default=None, help="Vector length for sun (default: length of mu)")
        parser.add_argument("--q", type=int, default=1, help="Start party (1-based) for fullsep")
        parser.add_argument("--qr-mu", default=None, help="Semicolon-separated mu vectors for fullsep, parties q..n")
        add_output_arguments(parser)

    def execute_run(self, report, options):
        names = [c.strip() for c in options["criterion"].split(",") if c.strip()]
        known = BIPARTITE_CRITERIA + MULTIPARTITE_CRITERIA
        unknown = [c for c in names if c not in known]
        if not names or unknown:
            raise usage_error(f"Unknown criterion {unknown or names}; choose from {', '.join(known)}")

        rho = load_state(options["state"])
        params = resolve_params(options, rho, report)
        if NEEDS_PARAMS & set(names) and params is None:
            raise usage_error("thm1 and bisep need --mu and --nu (or --auto-params)")

        alpha, beta, l = options["alpha"], options["beta"], options["l"]
        if params is not None:
            alpha = params.mu[0] if alpha is None else alpha
            beta = params.nu[0] if beta is None else beta
            l = params.n if l is None else l
        if NEEDS_SCALARS & set(names) and (alpha is None or beta is None):
            raise usage_error("shi and sun need --alpha/--beta or --mu/--nu")

        family = None
        if "fullsep" in names:
            family = parse_mu_family(options["qr_mu"], options["q"], rho.n_parties,
                                     list(params.mu) if params is not None else None)

        report.digest = state_digest(rho, {"criteria": names, "params": params.as_dict() if params else None})
        for name in names:
            crit = resolve_criterion(name, params=params, family=family, alpha=alpha, beta=beta,
                                     l=l if l is not None else 1, tau=options["tau"])
            target = rho if name in MULTIPARTITE_CRITERIA else bipartite_view(rho, options["cut"])
            report.reports.append(crit(target))

    def render_human(self, report, options):
        rows = [[r.criterion, r.lhs, r.rhs, r.margin, r.verdict.value] for r in report.reports]
        self.stdout.write(format_table(["criterion", "lhs", "rhs", "margin", "verdict"], rows))
        if report.optimization is not None:
            best = report.optimization.best
            self.stdout.write(f"auto-params: mu={best.mu.tolist()} nu={best.nu.tolist()}")
