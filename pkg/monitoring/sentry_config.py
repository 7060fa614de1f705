"""Sentry configuration for error tracking of command runs"""

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration
from config import settings
import logging

def init_sentry() -> bool:
    """Initialize Sentry SDK for error tracking; returns whether it was enabled"""

    # Only initialize Sentry if DSN is provided
    sentry_dsn = getattr(settings, 'SENTRY_DSN', None)

    if not sentry_dsn:
        logging.info("Sentry DSN not configured, skipping Sentry initialization")
        return False

    sentry_sdk.init(
        dsn=sentry_dsn,
        environment=settings.ENVIRONMENT,

        # Release tracking
        release=f"rtrans@{getattr(settings, 'VERSION', '0.1.0')}",

        # Integrations
        integrations=[
            LoggingIntegration(
                level=logging.INFO,        # Capture info and above as breadcrumbs
                event_level=logging.ERROR  # Send errors to Sentry
            ),
        ],

        # Error sampling
        sample_rate=1.0,

        # Dataset paths may name licensed data locations
        send_default_pii=False,
        before_send=filter_sensitive_data,
    )

    logging.info(f"Sentry initialized for environment: {settings.ENVIRONMENT}")
    return True


def filter_sensitive_data(event, hint):
    """Drop local dataset paths from run context before sending"""

    contexts = event.get('contexts', {})
    run = contexts.get('run')
    if isinstance(run, dict) and 'dataset_root' in run:
        run['dataset_root'] = '[FILTERED]'

    return event


def capture_exception(error: Exception, context: dict = None):
    """Manually capture an exception with run context (command, task, scheme, seed)"""
    with sentry_sdk.push_scope() as scope:
        if context:
            scope.set_context("run", context)
            for key in ("command", "task", "scheme"):
                if context.get(key) is not None:
                    scope.set_tag(key, str(context[key]))
        sentry_sdk.capture_exception(error)
