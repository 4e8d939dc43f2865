from django.apps import AppConfig


class LearnersConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'learners'
