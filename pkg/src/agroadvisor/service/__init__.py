from .config import ServiceConfig
from .engine import AdvisoryEngine
from .app import create_app, serve

__all__ = ["AdvisoryEngine", "ServiceConfig", "create_app", "serve"]
