from orthoqkd.__version__ import version as __version__  # noqa: F401
