from .services import LEARNER_NAMES, train  # noqa: F401
