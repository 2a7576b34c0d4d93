"""Python facade over the smoothltf C++ core."""

try:
    from ._smoothltf import *  # noqa: F401,F403  (installed wheel layout)
    from . import _smoothltf as _impl
except ImportError:  # development layout: module next to the build tree
    from _smoothltf import *  # noqa: F401,F403
    import _smoothltf as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
