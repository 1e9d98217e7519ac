from django.apps import AppConfig


class SeparabilityConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'separability'
    verbose_name = "Realignment separability criteria"
