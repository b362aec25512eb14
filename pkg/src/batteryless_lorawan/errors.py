from __future__ import annotations


class ParameterError(ValueError):
    """An argument is outside its physical or protocol domain."""


class ConfigurationError(ValueError):
    """A device or run configuration is inconsistent or incomplete."""
