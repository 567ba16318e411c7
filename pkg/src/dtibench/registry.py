"""Dataset registry: manifest-driven fetch with a content-addressed cache.

The manifest maps dataset names to a source (HTTP(S) URL or local path), a
sha256 checksum, and a license note.  Files land in the cache keyed by their
checksum, so a re-fetch of anything already present never touches the
network.  A checksum mismatch removes the partial file and raises.
"""

import hashlib
import json
import os
import shutil
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .errors import ChecksumError, ParseError, ValidationError

CACHE_ENV = "DTIBENCH_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dtibench"


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    source: str          # URL or filesystem path
    sha256: str
    license: str = ""

    def __post_init__(self):
        if len(self.sha256) != 64 or any(c not in "0123456789abcdef" for c in self.sha256):
            raise ValidationError(f"{self.name}: sha256 must be 64 lowercase hex chars")


@dataclass
class RegistryManifest:
    entries: dict

    @classmethod
    def load(cls, path) -> "RegistryManifest":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", path=str(path)) from None
        if not isinstance(raw, dict):
            raise ValidationError("manifest root must be an object")
        entries = {}
        for name, spec in sorted(raw.items()):
            try:
                entries[name] = ManifestEntry(
                    name=name,
                    source=spec["source"],
                    sha256=spec["sha256"].lower(),
                    license=spec.get("license", ""),
                )
            except (KeyError, TypeError, AttributeError):
                raise ValidationError(f"manifest entry {name!r} needs source and sha256") from None
        return cls(entries=entries)

    def names(self) -> list:
        return sorted(self.entries)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_dataset(manifest: RegistryManifest, name: str, cache_dir=None) -> Path:
    """Return a verified local copy of the named dataset.

    Cache hit: no network, no copy.  Otherwise download or copy, verify the
    checksum, and move into the cache under the checksum itself.
    """
    if name not in manifest.entries:
        available = ", ".join(manifest.names()) or "(none)"
        raise ValidationError(f"unknown dataset {name!r}; available: {available}")
    entry = manifest.entries[name]
    cache = Path(cache_dir) if cache_dir else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    suffix = Path(entry.source).suffix or ".dat"
    target = cache / f"{entry.sha256}{suffix}"
    if target.exists():
        return target
    partial = cache / f"{entry.sha256}{suffix}.partial"
    try:
        if entry.source.startswith(("http://", "https://")):
            with urllib.request.urlopen(entry.source) as resp, open(partial, "wb") as out:
                shutil.copyfileobj(resp, out)
        else:
            src = Path(entry.source)
            if not src.is_file():
                raise ValidationError(f"{name}: source file missing: {entry.source}")
            shutil.copyfile(src, partial)
        digest = _sha256_file(partial)
        if digest != entry.sha256:
            raise ChecksumError(
                f"{name}: checksum mismatch: expected {entry.sha256}, got {digest}"
            )
        partial.replace(target)
    finally:
        if partial.exists():
            partial.unlink()
    return target
