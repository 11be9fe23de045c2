# -*- coding: utf-8 -*-
"""Exceptions raised by qdcryptpy.

Each class carries the process exit code the command line maps it to.
"""


class QdCryptError(Exception):
    """Root of every error the toolkit raises on purpose."""
    exit_code = 1


class ConfigError(QdCryptError, ValueError):
    """Unknown preset, malformed config line or invalid sweep."""
    exit_code = 2


class AssumptionViolation(QdCryptError, ValueError):
    """A source or parameter breaks a security-analysis assumption."""
    exit_code = 3


class SolverFailure(QdCryptError, RuntimeError):
    """An SDP did not close where a certified value is required."""
    exit_code = 4

    def __init__(self, message: str, status: str = ''):
        super().__init__(message)
        self.status = status
