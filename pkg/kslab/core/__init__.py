from .commands import Commands, Format  # noqa: F401
