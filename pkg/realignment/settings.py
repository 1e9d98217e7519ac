"""
Django settings for the realignment project.

The project has no web surface: Django provides settings, logging configuration and
the management-command CLI for the ``separability`` app.
"""

import os

import environ
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# django-environ
env = environ.Env()
env_file = BASE_DIR / '.env'
env.read_env(env_file)

# Only used by Django internals; the CLI never signs anything.
SECRET_KEY = env('SECRET_KEY', default='realignment-cli-local-key')

DEBUG = env.bool('DEBUG', False)
ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=[])


# Application definition

INSTALLED_APPS = [
    # Third-party
    "rest_framework",

    # Local
    "separability",
]

# Database
# Nothing is persisted; sqlite keeps `manage.py check` and pytest-django quiet.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Rest framework (serializers and JSON rendering only)
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": ("rest_framework.renderers.JSONRenderer",),
    "DEFAULT_PARSER_CLASSES": ("rest_framework.parsers.JSONParser",),
    "COERCE_DECIMAL_TO_STRING": False,
    "UNAUTHENTICATED_USER": None,
}

# Separability toolkit
SEPARABILITY = {
    "TAU_DETECT": env.float("TAU_DETECT", default=1e-9),
    "THREADS": env.int("THREADS", default=os.cpu_count() or 1),
    "SCAN_TOL": env.float("SCAN_TOL", default=1e-7),
    "DEFAULT_SEED": env.int("SEED", default=20240601),
    "REFERENCE_VALUES": BASE_DIR / "separability" / "data" / "reference_values.json",
}

# Logging
LOG_LEVEL = env('LOG_LEVEL', default='WARNING')

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "separability": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}
