"""Exception types shared across the toolkit."""


class MdflowError(Exception):
    """Base class for toolkit-specific failures."""


class ScenarioError(MdflowError):
    """Malformed scenario input (schema violation, bad file, bad flags)."""


class InfeasibleError(MdflowError):
    """No capacity can meet the requested blocking target."""


class InstabilityError(MdflowError):
    """Delay chain has no stationary distribution (mean drift >= capacity)."""


class NonConvergenceError(MdflowError):
    """An iterative solver exhausted its iteration budget."""
