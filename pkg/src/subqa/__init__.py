"""Quality checks, fixes and statistics for translated WebVTT and SRT subtitles."""
from __future__ import annotations

__version__ = "0.1.0"
