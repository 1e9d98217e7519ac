from django.conf import settings

DEFAULTS = {
    "TAU_DETECT": 1e-9,
    "THREADS": 1,
    "SCAN_TOL": 1e-7,
    "DEFAULT_SEED": 20240601,
    "REFERENCE_VALUES": None,
}


def setting(name: str):
    """Read one key of ``settings.SEPARABILITY`` with a package default."""
    configured = getattr(settings, "SEPARABILITY", {})
    if name in configured:
        return configured[name]
    return DEFAULTS[name]


def tau_detect(tau: float | None = None) -> float:
    return float(setting("TAU_DETECT") if tau is None else tau)
