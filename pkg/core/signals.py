"""
Signals for the verification harness.
check_completed is sent by VerificationService after every check with the
check name and its report; the receiver below logs the outcome.
"""
import logging

from django.dispatch import Signal, receiver

logger = logging.getLogger(__name__)

# Sent with keyword arguments name and report.
check_completed = Signal()


@receiver(check_completed)
def log_check_result(sender, name, report, **kwargs):
    """
    Log every finished check: INFO when it passed, WARNING otherwise.
    """
    if report.passed:
        logger.info('check %s passed (%s)', name, report.quantity)
    else:
        logger.warning('check %s FAILED (%s), tolerance %g', name, report.quantity, report.tolerance)
