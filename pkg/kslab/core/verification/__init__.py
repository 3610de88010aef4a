"""Verification reports and the checks that produce them."""
from .report import *  # noqa: F401,F403
from .checks import *  # noqa: F401,F403
from .queue import *  # noqa: F401,F403
