"""Shared option parsing and error translation for the separability commands."""

from django.core.management.base import BaseCommand, CommandError

from separability.conf import setting
from separability.services.criteria import ParamPair, parse_vector
from separability.services.errors import NoSignChange, SeparabilityError
from separability.services.linalg import DensityMatrix, as_bipartite
from separability.services.optimizer import OptimizerConfig, optimize_params
from separability.services.reports import RunReport, render_report
from separability.services.state_io import parse_state_file
from separability.services.states import builtin_state, parse_builtin

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_NO_SIGN_CHANGE = 4
EXIT_DEVIATION = 5

DJANGO_OPTIONS = {"verbosity", "settings", "pythonpath", "traceback", "no_color", "force_color", "skip_checks",
                  "stdout", "stderr"}


def usage_error(message: str) -> CommandError:
    return CommandError(message, returncode=EXIT_USAGE)


def add_state_argument(parser):
    parser.add_argument("--state", required=True,
                        help="State source: file:<path> or builtin:<name>(<params>), e.g. builtin:tiles_noise(0.9)")


def add_param_arguments(parser):
    parser.add_argument("--mu", help="Comma-separated real vector mu")
    parser.add_argument("--nu", help="Comma-separated real vector nu")
    parser.add_argument("--auto-params", action="store_true", help="Choose mu, nu with the optimizer")
    parser.add_argument("--seed", type=int, default=None, help="Seed for --auto-params")
    parser.add_argument("--restarts", type=int, default=10, help="Optimizer restarts for --auto-params")
    parser.add_argument("--cut", type=int, default=1,
                        help="For states with more than two parties, bipartite criteria group parties [0, cut) "
                             "against the rest")


def add_output_arguments(parser):
    parser.add_argument("--json", action="store_true", help="Emit the run report as JSON")
    parser.add_argument("--tau", type=float, default=None, help="Detection threshold (default: TAU_DETECT)")


def load_state(spec: str) -> DensityMatrix:
    if spec.startswith("file:"):
        return parse_state_file(spec[len("file:"):])
    if spec.startswith("builtin:"):
        name, values = parse_builtin(spec[len("builtin:"):])
        return builtin_state(name, values)
    raise usage_error(f"--state must start with file: or builtin:, got {spec!r}")


def bipartite_view(rho: DensityMatrix, cut: int) -> DensityMatrix:
    return rho if rho.n_parties == 2 else as_bipartite(rho, cut)


def resolve_params(options: dict, rho: DensityMatrix | None = None, report: RunReport | None = None) -> ParamPair | None:
    """ParamPair from --mu/--nu, or from the optimizer with --auto-params."""
    if options.get("auto_params"):
        if rho is None:
            raise usage_error("--auto-params needs a state")
        n = len(parse_vector(options["mu"])) if options.get("mu") else 2
        m = len(parse_vector(options["nu"])) if options.get("nu") else 2
        seed = options.get("seed")
        cfg = OptimizerConfig(n=n, m=m, restarts=options.get("restarts") or 10,
                              seed=setting("DEFAULT_SEED") if seed is None else seed)
        result = optimize_params(bipartite_view(rho, options.get("cut") or 1), cfg)
        if report is not None:
            report.optimization = result
        return result.best
    mu, nu = options.get("mu"), options.get("nu")
    if mu is None and nu is None:
        return None
    if mu is None or nu is None:
        raise usage_error("--mu and --nu must be given together")
    return ParamPair(parse_vector(mu), parse_vector(nu))


class SeparabilityCommand(BaseCommand):
    """Runs ``execute_run`` and maps service errors onto the exit-code contract."""

    requires_system_checks = []
    requires_migrations_checks = False

    command_name = ""

    def echo(self, options: dict) -> str:
        parts = [self.command_name]
        for key, value in sorted(options.items()):
            if key in DJANGO_OPTIONS or value in (None, False, []):
                continue
            flag = "--" + key.replace("_", "-")
            parts.append(flag if value is True else f"{flag} {value}")
        return " ".join(parts)

    def handle(self, *args, **options):
        report = RunReport(command=self.echo(options))
        try:
            self.execute_run(report, options)
        except NoSignChange as exc:
            raise CommandError(f"NoSignChange: {exc}", returncode=EXIT_NO_SIGN_CHANGE)
        except SeparabilityError as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=EXIT_NUMERIC)
        report.finish()
        if options.get("json"):
            self.stdout.write(render_report(report.as_dict()).decode())
        else:
            self.render_human(report, options)
        self.after_output(report, options)

    def execute_run(self, report: RunReport, options: dict):
        raise NotImplementedError

    def render_human(self, report: RunReport, options: dict):
        raise NotImplementedError

    def after_output(self, report: RunReport, options: dict):
        pass
