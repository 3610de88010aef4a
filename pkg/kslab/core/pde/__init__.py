from .spectral import *  # noqa: F401,F403
from .history import *  # noqa: F401,F403
from .solver import *  # noqa: F401,F403
from .duhamel import *  # noqa: F401,F403
from .report import *  # noqa: F401,F403
from .run import *  # noqa: F401,F403
