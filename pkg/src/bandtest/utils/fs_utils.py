"""Filesystem resolution for sample, band and config paths."""

import os

import fsspec
from fsspec import AbstractFileSystem

AZURE_CREDENTIALS_ERROR = "Azure Blob Storage credentials not found in environment variables. Please set AZURE_STORAGE_ACCOUNT_NAME and AZURE_STORAGE_SAS_TOKEN."
UNSUPPORTED_PROTOCOL_ERROR = "Unsupported filesystem protocol: {}"
THREADS_ERROR = "BANDTEST_THREADS must be a nonnegative integer, got {!r}"


def get_filesystem(path: str) -> tuple[AbstractFileSystem, str]:
    """
    Get the appropriate filesystem based on the path prefix.
    If no prefix is provided, return the local filesystem.

    Args:
        path: Path to the file, can include fsspec prefix (e.g., 'abfs://')

    Returns:
        Tuple of (filesystem, path_without_prefix)
    """
    if "://" in path:
        protocol, path_without_prefix = path.split("://", 1)

        if protocol == "abfs":
            account_name = os.getenv("AZURE_STORAGE_ACCOUNT_NAME")
            sas_token = os.getenv("AZURE_STORAGE_SAS_TOKEN")

            if not account_name or not sas_token:
                raise ValueError(AZURE_CREDENTIALS_ERROR)
            fs = fsspec.filesystem("abfs", account_name=account_name, sas_token=sas_token)
            return fs, path_without_prefix
        elif protocol in ("file", "memory"):
            return fsspec.filesystem(protocol), path_without_prefix
        else:
            raise ValueError(UNSUPPORTED_PROTOCOL_ERROR.format(protocol))

    # Local filesystem
    return fsspec.filesystem("file"), path


def read_text(path: str) -> str:
    """Read a whole UTF-8 text file from any supported filesystem."""
    fs, bare_path = get_filesystem(path)
    with fs.open(bare_path, "r", encoding="utf-8") as file:
        return str(file.read())


def write_text(path: str, content: str) -> None:
    """Write a UTF-8 text file, creating parent directories on local filesystems."""
    fs, bare_path = get_filesystem(path)
    parent = bare_path.rsplit("/", 1)[0] if "/" in bare_path else ""
    if parent:
        fs.makedirs(parent, exist_ok=True)
    with fs.open(bare_path, "w", encoding="utf-8") as file:
        file.write(content)


def resolve_threads() -> int:
    """
    Number of worker threads for Monte-Carlo trials.

    Reads BANDTEST_THREADS; 0 or unset means one thread per CPU.
    """
    raw = os.getenv("BANDTEST_THREADS", "0").strip() or "0"
    try:
        threads = int(raw)
    except ValueError:
        raise ValueError(THREADS_ERROR.format(raw)) from None
    if threads < 0:
        raise ValueError(THREADS_ERROR.format(raw))
    return threads or (os.cpu_count() or 1)
