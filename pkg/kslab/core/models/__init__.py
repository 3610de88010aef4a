from .grid import *  # noqa: F401,F403
from .backend import *  # noqa: F401,F403
from .config import *  # noqa: F401,F403
