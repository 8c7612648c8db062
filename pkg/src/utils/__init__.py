# utils package
from src.utils.logger import get_logger
from src.utils.settings import Settings, get_settings

__all__ = ["get_logger", "Settings", "get_settings"]
