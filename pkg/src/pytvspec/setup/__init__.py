from .base import BaseSetup  # noqa
from .single import SingleSetup  # noqa
