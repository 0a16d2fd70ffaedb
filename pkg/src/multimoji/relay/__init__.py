"""Store-and-forward message relay: deterministic core plus asyncio server."""

from .client import ClientCore, RelayError, TcpClient
from .core import CloseConn, Notify, RelayCore, SendFrame, UserConfig
from .journal import Journal

__all__ = [
    "ClientCore",
    "CloseConn",
    "Journal",
    "Notify",
    "RelayCore",
    "RelayError",
    "SendFrame",
    "TcpClient",
    "UserConfig",
]
