from .app import create_app, run_server
from .config import ServiceConfig

__all__ = ["ServiceConfig", "create_app", "run_server"]
