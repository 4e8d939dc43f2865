"""
Test settings for pytest-django.
Eager Celery, fixed CSPSEL defaults and quiet logging.
"""
from .settings import *
from .conf import DEFAULTS

# Execute tasks synchronously
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = 'memory://'
CELERY_RESULT_BACKEND = 'cache+memory://'

# Disable Sentry in tests
SENTRY_DSN = None

# Fixed defaults regardless of the developer's environment
CSPSEL = dict(DEFAULTS)

# Logging for tests
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
}
