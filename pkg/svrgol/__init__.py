from svrgol.__version__ import version as __version__  # noqa

__all__ = ["__version__"]
