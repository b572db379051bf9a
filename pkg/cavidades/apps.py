from django.apps import AppConfig


class CavidadesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cavidades'
    verbose_name = 'Cavidades Optomecânicas'
