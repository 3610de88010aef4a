from .norms import *  # noqa: F401,F403
