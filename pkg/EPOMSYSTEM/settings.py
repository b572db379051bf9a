"""
Django settings for EPOMSYSTEM project.

The project has no web surface: Django hosts the management commands that
drive the simulations, the run ledger models and the logging setup.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

from pathlib import Path
import math
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-epom-local-only')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'import_export',
    'cavidades',
]


# Database
# The run ledger uses PostgreSQL when DATABASE_URL points at one, SQLite locally

database_url = os.environ.get('DATABASE_URL', '')
if database_url and database_url.startswith(('postgres://', 'postgresql://')):
    import dj_database_url
    DATABASES = {
        'default': dj_database_url.config(
            default=database_url,
            conn_max_age=600,
            conn_health_checks=True,
        )
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'db.sqlite3',
        }
    }


# Internationalization

LANGUAGE_CODE = 'pt-br'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Default primary key field type

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging

EPOM_LOG_LEVEL = os.environ.get('EPOM_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'cavidades': {
            'handlers': ['console'],
            'level': EPOM_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Simulation settings

# Worker threads for parameter sweeps when --threads is not given
EPOM_THREADS = int(os.environ.get('EPOM_THREADS', '1'))

# Long-horizon reproduction tests
EPOM_SLOW_TESTS = os.environ.get('EPOM_SLOW_TESTS', '0') == '1'

# Defaults for every run configuration; a config file only states what differs.
# eta is absolute here (0.1 g_m); values read from config files follow `units`.
EPOM_DEFAULTS = {
    'units': 'gm',
    'params': {
        'delta_1': 1.0,
        'delta_2': -1.0,
        'g_m': 1.076e-4,
        'eta': 0.1 * 1.076e-4,
        'kappa': 7.3e-2,
        'gamma_m': 1.076e-5,
        'j_m': 4e-4,
        'alpha_in': 20.0,
        'omega_m': 1.0,
    },
    'integrator': {
        'method': 'fixed-rk4',
        'dt': 0.05,
        'rel_tol': 1e-9,
        'abs_tol': 1e-12,
        't_end': 2e5,
        'sample_stride': 1.0,
        'transient_fraction': 0.5,
        'max_step': 0.1,
        'min_step': 1e-6,
        'max_evaluations': 0,
    },
    'kick': 1e-3,
    # systems per compiled march; bounds the sample buffer (16 x 1e5 samples ~ 100 MB)
    'batch_size': 16,
    'alpha_grid': {'start': 1.0, 'stop': 200.0, 'step': 1.0},
    'eta_grid': [0.0, 0.25, 0.5, 0.75, 1.0],
    'lyapunov': {
        'renorm_interval': 1.0,
        'n_renorms': 10000,
        'separation': 1e-8,
        'warmup': 100,
    },
    'poincare': {
        'rule': 'strobe',
        'period': 2 * math.pi,
        'phase': 0.0,
        'min_points': 100,
    },
    'beats': {
        'start': 'steady',
        'min_samples': 2 ** 14,
        'peak_ratio': 0.1,
    },
    'fixed_point_tol': 1e-6,
}
