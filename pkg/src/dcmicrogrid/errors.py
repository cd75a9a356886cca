"""Exception types shared across the simulator."""


class MicrogridError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MicrogridError):
    """A scenario file or parameter set violates an invariant."""


class SolverError(MicrogridError):
    """A numerical solve failed to converge.

    Carries the operating point so the failing condition can be reproduced.
    """

    def __init__(self, message, v=None, g=None, t_cell=None):
        super().__init__(message)
        self.v = v
        self.g = g
        self.t_cell = t_cell


class SimulationError(MicrogridError):
    """A sub-model failed during a simulation run.

    Identifies the failing timestep and component.
    """

    def __init__(self, message, step=None, t=None, component=None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.component = component
