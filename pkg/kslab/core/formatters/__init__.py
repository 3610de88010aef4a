from .binary import *  # noqa: F401,F403
from .generic import *  # noqa: F401,F403
