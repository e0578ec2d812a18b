# module_block_building/errors.py


class FifoGapError(Exception):
    """Base class for every error raised by this project."""


class InstanceError(FifoGapError, ValueError):
    """A transaction list or block parameters violate the model assumptions."""


class InstanceTooLargeError(FifoGapError, RuntimeError):
    """An exact solver was asked to handle more transactions than its limit."""

    def __init__(self, n, limit_n, solver='exact_pack'):
        super().__init__(f"{solver}: instance has n={n} transactions, limit is {limit_n}; "
                         f"use greedy_pack bounds instead")
        self.n = n
        self.limit_n = limit_n


class ConfigError(FifoGapError, ValueError):
    """Experiment or CLI configuration is invalid."""


class InputFormatError(ConfigError):
    """A text input file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no, message):
        location = f"{path}:{line_no}" if line_no else str(path)
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line_no = line_no


class SandwichViolation(FifoGapError, AssertionError):
    """A trial broke p0 <= p_star <= r_star or p_fifo <= r_star."""
