"""
Django settings for the cspsel project.

Only configuration, logging and the management-command CLI are used from
Django; none of the apps own database tables.
"""
import os
from pathlib import Path
import environ

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Initialize environment variables
env = environ.Env(
    DEBUG=(bool, False)
)
environ.Env.read_env(os.path.join(BASE_DIR, '.env'))

SECRET_KEY = env('SECRET_KEY', default='cspsel-local-only')

DEBUG = env('DEBUG', default=False)

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'instances',
    'features',
    'performance',
    'learners',
    'pipeline',
    'evaluation',
]

# Database
# Nothing is persisted; Django only needs a default connection to start.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Algorithm selection configuration
# Every entry can be overridden with an environment variable prefixed CSPSEL_
CSPSEL = {
    'TIMEOUT_SECONDS': env.float('CSPSEL_TIMEOUT_SECONDS', default=3600.0),
    'TIGHTNESS_SAMPLES': env.int('CSPSEL_TIGHTNESS_SAMPLES', default=1000),
    'SYMMETRY_MAX_ARITY': env.int('CSPSEL_SYMMETRY_MAX_ARITY', default=4),
    'NODES_CPU_FLOOR': env.float('CSPSEL_NODES_CPU_FLOOR', default=1e-3),
    'FOLDS': env.int('CSPSEL_FOLDS', default=3),
    'SEED': env.int('CSPSEL_SEED', default=0),
    'LEARNERS': env.list('CSPSEL_LEARNERS', default=['zeror', 'oner', 'nbayes', 'knn', 'tree']),
    'ONER_MIN_BUCKET': env.int('CSPSEL_ONER_MIN_BUCKET', default=6),
    'NB_VAR_FLOOR': env.float('CSPSEL_NB_VAR_FLOOR', default=1e-9),
    'KNN_K': env.int('CSPSEL_KNN_K', default=5),
    'TREE_MAX_DEPTH': env.int('CSPSEL_TREE_MAX_DEPTH', default=20),
    'TREE_MIN_LEAF': env.int('CSPSEL_TREE_MIN_LEAF', default=2),
}

# Celery Configuration
# Workers are optional: extraction and training run inline unless --celery is passed
REDIS_URL = env('REDIS_URL', default='redis://localhost:6379/0')

CELERY_BROKER_URL = REDIS_URL
CELERY_RESULT_BACKEND = REDIS_URL
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_BROKER_CONNECTION_RETRY_ON_STARTUP = True
CELERY_BROKER_CONNECTION_MAX_RETRIES = 10

# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'sentry_sdk': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        **{
            name: {
                'handlers': ['console'],
                'level': 'DEBUG' if DEBUG else 'INFO',
                'propagate': False,
            }
            for name in ('cspsel', 'instances', 'features', 'performance',
                         'learners', 'pipeline', 'evaluation')
        },
    },
}

# Sentry Error Tracking (optional - only if SENTRY_DSN is set)
# Sentry is initialized in cspsel/__init__.py so commands and workers share it
SENTRY_DSN = env('SENTRY_DSN', default=None)
