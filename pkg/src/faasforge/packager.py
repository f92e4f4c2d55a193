"""Deployable archives for function units, plus debug-mode file output."""
from __future__ import annotations

import io
import json
import zipfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Sequence, Tuple

MIN_MEMORY_MB, MAX_MEMORY_MB = 128, 1536
MIN_TIMEOUT_S, MAX_TIMEOUT_S = 1, 300
CONFIG_ENTRY = "config.json"
_EPOCH = (1980, 1, 1, 0, 0, 0)  # earliest timestamp a ZIP entry can carry


class PackagingError(ValueError):
    pass


@dataclass(frozen=True)
class UnitConfig:
    name: str
    handler: str = ""
    memory_mb: int = 128
    timeout_s: int = 300

    def __post_init__(self):
        if not self.handler:
            object.__setattr__(self, "handler", f"{self.name}.lambda_handler")
        self.validate()

    def validate(self):
        for key in ("memory_mb", "timeout_s"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int):
                raise PackagingError(f"{key} must be an integer, got {value!r}")
        if not MIN_TIMEOUT_S <= self.timeout_s <= MAX_TIMEOUT_S:
            raise PackagingError(f"timeout_s={self.timeout_s} outside [{MIN_TIMEOUT_S}, {MAX_TIMEOUT_S}]")
        if not MIN_MEMORY_MB <= self.memory_mb <= MAX_MEMORY_MB:
            raise PackagingError(f"memory_mb={self.memory_mb} outside [{MIN_MEMORY_MB}, {MAX_MEMORY_MB}]")
        if not self.handler.startswith(self.name + "."):
            raise PackagingError(f"handler {self.handler!r} does not belong to unit {self.name!r}")

    @property
    def handler_name(self) -> str:
        return self.handler.rsplit(".", 1)[1]

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "UnitConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PackagingError(f"config.json is not JSON: {exc}") from None
        if not isinstance(data, dict) or set(data) != {"name", "handler", "memory_mb", "timeout_s"}:
            raise PackagingError("config.json must hold exactly name, handler, memory_mb, timeout_s")
        return cls(**data)


@dataclass(frozen=True)
class UnitArchive:
    data: bytes

    @property
    def entries(self) -> List[str]:
        with zipfile.ZipFile(io.BytesIO(self.data)) as zf:
            return zf.namelist()


def package_unit(unit, config: UnitConfig) -> UnitArchive:
    """ZIP the unit source and its config; equal inputs give equal bytes."""
    config.validate()
    if config.name != unit.unit_name:
        raise PackagingError(f"config name {config.name!r} differs from unit {unit.unit_name!r}")
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, text in ((f"{unit.unit_name}.py", unit.source), (CONFIG_ENTRY, config.to_json())):
            info = zipfile.ZipInfo(name, date_time=_EPOCH)
            info.external_attr = 0o644 << 16
            info.create_system = 3
            zf.writestr(info, text.encode("utf-8"))
    return UnitArchive(buf.getvalue())


def unpack(archive) -> Tuple[str, str, UnitConfig]:
    """Return ``(unit_name, source, config)`` from archive bytes."""
    data = archive.data if isinstance(archive, UnitArchive) else bytes(archive)
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            names = zf.namelist()
            if len(names) != 2 or names[1] != CONFIG_ENTRY or not names[0].endswith(".py"):
                raise PackagingError(f"archive must hold <unit>.py then config.json, found {names}")
            source = zf.read(names[0]).decode("utf-8")
            config = UnitConfig.from_json(zf.read(CONFIG_ENTRY).decode("utf-8"))
    except zipfile.BadZipFile as exc:
        raise PackagingError(f"malformed archive: {exc}") from None
    except UnicodeDecodeError as exc:
        raise PackagingError(f"archive entry is not UTF-8: {exc}") from None
    unit_name = names[0][:-3]
    if unit_name != config.name:
        raise PackagingError(f"source entry {names[0]!r} does not match config name {config.name!r}")
    return unit_name, source, config


def write_debug_outputs(rewritten, units: Sequence, outdir) -> List[Path]:
    """Write rewritten module(s) and unit sources; nothing is executed.

    ``rewritten`` is one rewritten module or a sequence of them.
    """
    outdir = Path(outdir)
    modules = [rewritten] if hasattr(rewritten, "source") else list(rewritten)
    written: List[Path] = []
    outdir.mkdir(parents=True, exist_ok=True)
    for module in modules:
        path = outdir / f"{module.name}_rewritten.py"
        path.write_text(module.source, encoding="utf-8")
        written.append(path)
    if units:
        (outdir / "units").mkdir(exist_ok=True)
    for unit in units:
        path = outdir / "units" / f"{unit.unit_name}.py"
        path.write_text(unit.source, encoding="utf-8")
        written.append(path)
    return written
