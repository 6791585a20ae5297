"""
Django settings for dp3asym project.

Generated by 'django-admin startproject' using Django 5.0 and trimmed down to
a command-line tool: no web surface, no database.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DP3_SECRET_KEY', 'django-insecure-dp3asym-local-only')

DEBUG = os.environ.get('DP3_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Local apps
    'core',
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.0/ref/settings/#databases

# Everything is computed on the fly; nothing is persisted.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.0/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/5.0/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
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
        'core': {
            'handlers': ['console'],
            'level': os.environ.get('DP3_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}


# Asymptotics toolkit settings

DP3_TOOL_VERSION = '1.0.0'

# Upper bound on any truncation order N (coefficient tables, evaluations)
DP3_MAX_N = int(os.environ.get('DP3_MAX_N', '64'))

DP3_TOLERANCES = {
    'abs_floor': 1e-14,
    'coefficient': 1e-12,
    'manifold': 1e-10,
    'classify': 1e-12,
    'composition': 1e-10,
    'identity': 1e-9,
    'sigma_form': 1e-6,
    'instanton': 1e-12,
    'decay_fit': 0.2,
}

# |u| or |tau| below this aborts an integration step
DP3_POLE_FLOOR = 1e-10

DP3_DEFAULT_REL_TOL = 1e-11

DP3_SWEEP_WORKERS = int(os.environ.get('DP3_SWEEP_WORKERS', '4'))
