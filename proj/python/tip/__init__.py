"""Task-informed trajectory prediction toolkit."""

from tip._tip import *  # noqa: F401,F403
from tip._tip import __doc__  # noqa: F401
