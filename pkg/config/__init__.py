from .config import ROOT_DIR, get_config, load_config_file, merge_config, resolve_threads

__all__ = ["ROOT_DIR", "get_config", "load_config_file", "merge_config", "resolve_threads"]
