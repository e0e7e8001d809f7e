import logging

from app.config.settings import settings

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

logging.basicConfig(level=settings.LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger("sftdegree")


def configure_logging(level):
    """Reset the root level, e.g. after CLI verbosity flags are parsed."""
    logging.getLogger().setLevel(level)
    logger.setLevel(level)
