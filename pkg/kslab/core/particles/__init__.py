from .streams import *  # noqa: F401,F403
from .ensemble import *  # noqa: F401,F403
from .mesh import *  # noqa: F401,F403
from .drift import *  # noqa: F401,F403
from .dynamics import *  # noqa: F401,F403
from .kde import *  # noqa: F401,F403
from .run import *  # noqa: F401,F403
