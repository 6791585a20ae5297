from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'core'
    verbose_name = 'DP3E trans-series asymptotics'

    def ready(self):
        """
        Import signals when the app is ready.
        This ensures that the check_completed receiver is registered.
        """
        import core.signals  # noqa: F401
