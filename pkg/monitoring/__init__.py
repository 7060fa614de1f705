"""Monitoring and error tracking for R-Trans"""

from .sentry_config import init_sentry, capture_exception

__all__ = ['init_sentry', 'capture_exception']
