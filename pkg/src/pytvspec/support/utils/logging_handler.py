"""
Logging handler.
Part of the pyTVSpec package.
"""

import logging
import os


def configure_logging() -> logging.Logger:
    """
    Configures and initializes logging for the pyTVSpec package.

    The package logger level is read from an environment variable. A console handler is
    attached once, with a format that includes timestamp, logger name, level, message,
    module and line number. Logging from matplotlib can be silenced.

    Environment Variables
    ---------------------
    PYTVSPEC_LOG_LEVEL : str, optional
        Logging level for the ``pytvspec`` logger ('DEBUG', 'INFO', 'WARNING', 'ERROR',
        'CRITICAL'). Defaults to 'INFO'.
    PYTVSPEC_DISABLE_MATPLOTLIB_LOGGING : str, optional
        If 'True' or '1', disables logging from matplotlib. Defaults to 'True'.

    Returns
    -------
    logging.Logger
        The configured root logger of the package.
    """
    log_level = os.getenv("PYTVSPEC_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, log_level, logging.INFO)

    logger = logging.getLogger(name="pytvspec")
    logger.setLevel(level)

    # worker processes re-import the package; one handler is enough
    if not any(getattr(h, "_pytvspec", False) for h in logger.handlers):
        ch = logging.StreamHandler()
        ch.setLevel(level)
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s (%(module)s:%(lineno)d)"
        )
        ch.setFormatter(formatter)
        ch._pytvspec = True
        logger.addHandler(ch)

    if os.getenv("PYTVSPEC_DISABLE_MATPLOTLIB_LOGGING", "True") in ["True", "true", "1"]:
        logging.getLogger("matplotlib").setLevel(logging.CRITICAL + 1)
    return logger
