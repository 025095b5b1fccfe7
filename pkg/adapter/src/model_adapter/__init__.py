from .app import AdapterConfig, build_app, load_model

__all__ = ["AdapterConfig", "build_app", "load_model"]
