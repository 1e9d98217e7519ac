from separability.conf import setting
from separability.management.commands._options import (
    SeparabilityCommand, add_output_arguments, add_state_argument, bipartite_view, load_state, usage_error,
)
from separability.services.criteria import ParamPair, parse_vector, theorem1_margin
from separability.services.optimizer import OptimizerConfig, optimize_params
from separability.services.reports import format_table, state_digest


def parse_warm_start(text: str) -> ParamPair:
    """``"mu;nu"`` with comma-separated entries, e.g. ``11.66;11.75``."""
    mu, sep, nu = text.partition(";")
    if not sep:
        raise usage_error(f"--warm-start expects mu;nu, got {text!r}")
    return ParamPair(parse_vector(mu), parse_vector(nu))


class Command(SeparabilityCommand):
    help = "Search mu, nu maximizing the realignment margin of a bipartite state"
    command_name = "optimize"

    def add_arguments(self, parser):
        add_state_argument(parser)
        parser.add_argument("--n", type=int, default=2, help="Length of mu")
        parser.add_argument("--m", type=int, default=2, help="Length of nu")
        parser.add_argument("--restarts", type=int, default=10)
        parser.add_argument("--max-iters", type=int, default=400, help="Nelder-Mead iterations per restart")
        parser.add_argument("--init-scale", type=float, default=1.0)
        parser.add_argument("--seed", type=int, default=None, help="Default: the DEFAULT_SEED setting")
        parser.add_argument("--opt-tol", type=float, default=1e-10, help="Nelder-Mead fatol/xatol")
        parser.add_argument("--max-evals", type=int, default=None, help="Stop after this many evaluations")
        parser.add_argument("--warm-start", action="append", default=[], help="Evaluate mu;nu first (repeatable)")
        parser.add_argument("--cut", type=int, default=1,
                            help="For states with more than two parties, group parties [0, cut) against the rest")
        add_output_arguments(parser)

    def execute_run(self, report, options):
        rho = bipartite_view(load_state(options["state"]), options["cut"])
        seed = setting("DEFAULT_SEED") if options["seed"] is None else options["seed"]
        cfg = OptimizerConfig(
            n=options["n"],
            m=options["m"],
            restarts=options["restarts"],
            max_iters=options["max_iters"],
            init_scale=options["init_scale"],
            seed=seed,
            tol=options["opt_tol"],
            max_evaluations=options["max_evals"],
            warm_starts=tuple(parse_warm_start(w) for w in options["warm_start"]),
        )
        result = optimize_params(rho, cfg)
        report.optimization = result
        report.reports.append(theorem1_margin(rho, result.best, options["tau"]))
        report.digest = state_digest(rho, {"n": cfg.n, "m": cfg.m, "restarts": cfg.restarts, "seed": seed,
                                           "max_iters": cfg.max_iters, "init_scale": cfg.init_scale})

    def render_human(self, report, options):
        result = report.optimization
        mu_norm, nu_norm = result.norms
        self.stdout.write(f"mu  {[round(v, 6) for v in result.best.mu.tolist()]}  |mu|={mu_norm:.6g}")
        self.stdout.write(f"nu  {[round(v, 6) for v in result.best.nu.tolist()]}  |nu|={nu_norm:.6g}")
        self.stdout.write(f"evaluations {result.evaluations}" + ("  (budget exhausted)" if result.timed_out else ""))
        rows = [[r.criterion, r.lhs, r.rhs, r.margin, r.verdict.value] for r in report.reports]
        self.stdout.write(format_table(["criterion", "lhs", "rhs", "margin", "verdict"], rows))
