from .constants import *  # noqa: F401,F403
from .bootstrap import *  # noqa: F401,F403
