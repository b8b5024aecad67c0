"""mlm_adapter: masked-LM scoring server for the scramblekit-score protocol."""

__version__ = "0.1.0"

from .backends import HfBackend, StubBackend, load_backend
from .server import AdapterConfig, serve
