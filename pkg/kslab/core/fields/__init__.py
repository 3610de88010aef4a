from .kernels import *  # noqa: F401,F403
from .mixture import *  # noqa: F401,F403
