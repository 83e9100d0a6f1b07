from .data.run_params import (  # noqa
    AdaptSpecRunParams,
    GarchRunParams,
    MsGarchRunParams,
)
from .adaptspec import AdaptSpec  # noqa
from .garch import GARCH, MSGARCH  # noqa
from .base import BaseAlgorithm  # noqa

ESTIMATORS = {cls.code: cls for cls in (AdaptSpec, GARCH, MSGARCH)}
