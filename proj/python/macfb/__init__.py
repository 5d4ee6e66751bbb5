"""Three-user MAC-with-feedback simulation and rate-region toolkit."""

try:
    from ._macfb import *  # noqa: F401,F403  (installed wheel layout)
    from ._macfb import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package on sys.path
    from _macfb import *  # noqa: F401,F403
    from _macfb import __version__  # noqa: F401
