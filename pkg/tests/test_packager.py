from __future__ import annotations

import io
import json
import zipfile

import pytest

from faasforge.packager import PackagingError, UnitArchive, UnitConfig, package_unit, unpack, write_debug_outputs

from helpers import transform


@pytest.fixture
def fib_unit():
    return transform("fib").units[0]


def test_archive_layout(fib_unit):
    archive = package_unit(fib_unit, fib_unit.config)
    assert archive.entries == ["fib_fib.py", "config.json"]
    with zipfile.ZipFile(io.BytesIO(archive.data)) as zf:
        for info in zf.infolist():
            assert info.compress_type == zipfile.ZIP_STORED
            assert info.date_time == (1980, 1, 1, 0, 0, 0)
        assert zf.read("fib_fib.py").decode() == fib_unit.source


def test_archive_bytes_are_deterministic(fib_unit):
    first = package_unit(fib_unit, fib_unit.config)
    second = package_unit(transform("fib").units[0], UnitConfig("fib_fib"))
    assert first.data == second.data


def test_config_json_is_compact_with_four_keys(fib_unit):
    text = fib_unit.config.to_json()
    assert " " not in text
    assert json.loads(text) == {"name": "fib_fib", "handler": "fib_fib.lambda_handler",
                                "memory_mb": 128, "timeout_s": 300}


def test_unpack_round_trip(fib_unit):
    name, source, config = unpack(package_unit(fib_unit, fib_unit.config))
    assert (name, source, config) == ("fib_fib", fib_unit.source, fib_unit.config)


@pytest.mark.parametrize("kwargs", [
    {"timeout_s": 0}, {"timeout_s": 301}, {"memory_mb": 127}, {"memory_mb": 1537},
    {"timeout_s": 2.5}, {"memory_mb": True}, {"handler": "other.lambda_handler"},
])
def test_config_bounds(kwargs):
    with pytest.raises(PackagingError):
        UnitConfig("u", **kwargs)


def test_config_bounds_inclusive():
    UnitConfig("u", memory_mb=128, timeout_s=1)
    UnitConfig("u", memory_mb=1536, timeout_s=300)


def test_from_json_rejects_extra_keys():
    with pytest.raises(PackagingError):
        UnitConfig.from_json('{"name":"u","handler":"u.lambda_handler","memory_mb":128,"timeout_s":1,"x":1}')
    with pytest.raises(PackagingError):
        UnitConfig.from_json("not json")


def test_name_mismatch_rejected(fib_unit):
    with pytest.raises(PackagingError):
        package_unit(fib_unit, UnitConfig("other"))


def test_unpack_rejects_malformed():
    with pytest.raises(PackagingError):
        unpack(b"not a zip")
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        zf.writestr("config.json", "{}")
    with pytest.raises(PackagingError):
        unpack(UnitArchive(buf.getvalue()))


def test_debug_outputs(tmp_path):
    result = transform("shapes_app")
    written = write_debug_outputs(result.modules, result.units, tmp_path)
    assert (tmp_path / "shapes_app_rewritten.py").read_text() == result.rewritten.source
    assert (tmp_path / "geometry_rewritten.py").is_file()
    for unit in result.units:
        assert (tmp_path / "units" / f"{unit.unit_name}.py").read_text() == unit.source
    assert len(written) == len(result.modules) + len(result.units)
