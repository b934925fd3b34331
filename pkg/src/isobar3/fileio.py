"""Atomic file writes and checksums shared by caches, reports, and the CLI."""

import hashlib
import os

from .errors import IoError


def atomic_write_bytes(path, data):
    """Write-then-rename so readers never observe a partial file."""
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def sha256_hex(data):
    return hashlib.sha256(data).hexdigest()
