"""
Celery configuration for the cspsel project.
"""
import os
from celery import Celery

# Set the default Django settings module for the 'celery' program.
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cspsel.settings')

app = Celery('cspsel')

# Using a string here means the worker doesn't have to serialize
# the configuration object to child processes.
app.config_from_object('django.conf:settings', namespace='CELERY')

# Load task modules from all registered Django apps.
app.autodiscover_tasks()

# Don't connect to broker on import - only when work is dispatched
app.conf.broker_connection_retry_on_startup = True
