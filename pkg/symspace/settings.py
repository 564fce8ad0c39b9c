"""
Django settings for the symspace project.

symspace has no web surface and no database: Django supplies the management
command framework (the `symspace` CLI), the settings layer below and the test
runner.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get("SYMSPACE_SECRET_KEY", "django-insecure-symspace-local-only")

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'geometry',
]

# No models anywhere; the dummy backend keeps the test runner from creating one.
DATABASES = {}

USE_TZ = True


# ----------------------------
# Logging
# ----------------------------

LOG_LEVEL = os.environ.get("SYMSPACE_LOG_LEVEL", "WARNING").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "kv": {
            "format": "%(asctime)s level=%(levelname)s logger=%(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "kv",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "geometry": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
        "symspace": {
            "handlers": ["console"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}


# ----------------------------
# Numerics + experiments
# ----------------------------

def _env_seed() -> int:
    raw = (os.environ.get("SYMSPACE_SEED") or "").strip()
    if raw == "":
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ImproperlyConfigured(f"SYMSPACE_SEED must be an integer, got {raw!r}") from exc


SYMSPACE = {
    # Randomized suites
    "SEED": _env_seed(),

    # polar: warn when |log x|_F exceeds this
    "GPD_WARN_NORM": 0.5,

    # experiments
    "DIVERGENCE_THRESHOLD": 1e6,
    "BE_NEWTON_TOL": 1e-12,
    "BE_NEWTON_MAX_ITER": 30,
    "REFERENCE_REFINEMENT": 64,
    "T_END": 1.0,
    "WORKERS": int(os.environ.get("SYMSPACE_WORKERS", "4")),

    "ALTDIR": {
        "GRID": 64,
        "L": 5.0,
        "H": 1e-2,
        "NONLINEARITY": 2e-3,
        "LEVELS": 3,
        "RUNGS": 5,
        "HMAX": 0.125,
    },
    "STIFF": {
        "L": 1.0,
        "DELTA": 0.1,
        "RUNGS": 7,
        "H0_BRACKET": (1e-3, 1.0 / 3.0),
        "H0_BISECTIONS": 30,
        # step-to-step sup-norm growth that counts as instability
        "GROWTH_TOL": 1e-9,
    },
    "COMPOSE": {
        "HMAX": 0.125,
        "RUNGS": 5,
        "LEVELS": 3,
    },
}
