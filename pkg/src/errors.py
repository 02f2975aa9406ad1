"""Exception hierarchy shared by every MaskLab package."""


class MaskLabError(Exception):
    """Base class for all MaskLab errors."""


class DimensionMismatchError(MaskLabError, ValueError):
    """Two grids that must share a size do not."""


class EmptyMaskError(MaskLabError, ValueError):
    """An operation needs at least one foreground pixel."""


class InvalidParameterError(MaskLabError, ValueError):
    """A numeric parameter or range is outside its documented domain."""


class RetryBudgetExceeded(MaskLabError, RuntimeError):
    """A rejection-sampling loop ran out of attempts."""


class ConfigError(MaskLabError):
    """An experiment config file is missing or invalid."""

    def __init__(self, path, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class StepError(MaskLabError, RuntimeError):
    """Generator or segmenter failure inside an IMD step."""

    def __init__(self, step: int, sample: int, message: str):
        self.step = step
        self.sample = sample
        super().__init__(f"IMD step {step}, sample {sample}: {message}")


class SceneError(MaskLabError, RuntimeError):
    """Failure while running one scene of a sweep."""

    def __init__(self, scene_id: int, axis_value, message: str):
        self.scene_id = scene_id
        self.axis_value = axis_value
        super().__init__(f"scene {scene_id} at axis value {axis_value!r}: {message}")
