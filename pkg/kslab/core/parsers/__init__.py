from .cli import *  # noqa: F401,F403
