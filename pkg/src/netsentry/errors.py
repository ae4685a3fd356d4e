"""Shared exception types."""


class NetsentryError(Exception):
    """Base class for all engine errors."""


class DataError(NetsentryError):
    """Bad input data (unreadable file, wrong labels, degenerate sets)."""


class SchemaError(DataError):
    """Feature schema does not match the data."""


class ConfigError(NetsentryError):
    """Invalid configuration value or file."""


class ScenarioError(NetsentryError):
    """Infeasible attacker-simulation scenario."""
