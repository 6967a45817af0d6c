import pytest
from hypothesis import given, strategies as st

from conftest import make_job, utc
from tgscrape.config import (
    ChannelRef,
    ConfigError,
    Credentials,
    OutputFormat,
    ScrapeJobSpec,
    load_credentials,
    normalize_output_format,
    parse_channel_list,
    parse_credentials,
    parse_date_window,
    validate_job,
)


def handles(refs):
    return [r.handle for r in refs]


def test_channel_list_from_form_example():
    raw = "@LulanoTelegram, @jairbolsonarobrasil, @Other_Channel_Name"
    assert handles(parse_channel_list(raw)) == ["@LulanoTelegram", "@jairbolsonarobrasil", "@Other_Channel_Name"]


def test_single_channel():
    assert handles(parse_channel_list("@A")) == ["@A"]


def test_tme_links_normalized_and_whitespace_trimmed():
    assert handles(parse_channel_list("https://t.me/Foo ,  @Bar")) == ["@Foo", "@Bar"]


def test_empty_items_dropped():
    assert handles(parse_channel_list(" , @A,,@B , ")) == ["@A", "@B"]


@pytest.mark.parametrize(
    "item",
    ["https://web.telegram.org/a/#-1001249230829", "-1001249230829", "1001249230829", "@two words", "https://t.me/"],
)
def test_forbidden_channel_forms(item):
    with pytest.raises(ConfigError) as exc:
        parse_channel_list(f"@Ok, {item}")
    assert exc.value.field == "channels"
    if item.strip():
        assert item.split()[0] in str(exc.value)


@given(st.text())
def test_channel_refs_always_valid(raw):
    try:
        refs = parse_channel_list(raw)
    except ConfigError:
        return
    for ref in refs:
        assert ref.handle and not any(c.isspace() for c in ref.handle)
        assert not ref.handle.startswith("https://web.telegram.org")
        assert not all(c.isdigit() or c == "-" for c in ref.handle)


@given(st.lists(st.from_regex(r"@?[A-Za-z_][A-Za-z0-9_]{0,20}", fullmatch=True), max_size=8))
def test_channel_list_idempotent(items):
    first = handles(parse_channel_list(", ".join(items)))
    assert handles(parse_channel_list(",".join(first))) == first


def test_date_window_midnight_utc():
    w = parse_date_window("2024-10-15", "2025-01-15")
    assert w.date_min == utc(2024, 10, 15)
    assert w.date_max == utc(2025, 1, 15)
    assert w.date_min.utcoffset().total_seconds() == 0


def test_single_day_window():
    w = parse_date_window("2024-01-01", "2024-01-01")
    assert w.date_min == w.date_max


@pytest.mark.parametrize("lo,hi", [("2025-01-15", "2024-10-15"), ("15/10/2024", "2025-01-15"), ("2024-13-01", "2025-01-01")])
def test_bad_windows(lo, hi):
    with pytest.raises(ConfigError):
        parse_date_window(lo, hi)


@given(st.dates(), st.dates())
def test_window_ordering_or_error(a, b):
    try:
        w = parse_date_window(a.isoformat(), b.isoformat())
    except ConfigError:
        assert a > b
    else:
        assert w.date_min <= w.date_max


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("excel", OutputFormat.WORKBOOK),
        ("PARQUET", OutputFormat.PARQUET),
        (" Excel! ", OutputFormat.WORKBOOK),
        ("par-quet", OutputFormat.PARQUET),
    ],
)
def test_normalize_output_format(raw, expected):
    assert normalize_output_format(raw) is expected


@pytest.mark.parametrize("raw", ["csv", "", "xlsx"])
def test_normalize_output_format_rejects(raw):
    with pytest.raises(ConfigError):
        normalize_output_format(raw)


def test_form_defaults_validate():
    v = make_job(key_search="", max_t_index=1_000_000, time_limit=21600, output_format=OutputFormat.WORKBOOK)
    assert v.warnings == []
    assert v.file_name == "Test"
    assert len(v.channels) == 3


def test_empty_channels_rejected():
    with pytest.raises(ConfigError, match="channels: empty"):
        validate_job(ScrapeJobSpec([], parse_date_window("2024-01-01", "2024-01-02"), "Test"))


def test_long_time_limit_warns_but_passes():
    v = make_job(time_limit=22000)
    assert len(v.warnings) == 1
    assert "21600" in v.warnings[0] and "22800" in v.warnings[0]


@pytest.mark.parametrize(
    "kw,field",
    [
        ({"max_t_index": 0}, "max_t_index"),
        ({"time_limit": 0}, "time_limit"),
        ({"file_name": "a/b"}, "file_name"),
        ({"file_name": ""}, "file_name"),
    ],
)
def test_invariant_violations_name_field(kw, field):
    with pytest.raises(ConfigError) as exc:
        make_job(**kw)
    assert exc.value.field == field


GOOD_CREDS = "username=abc123\nphone=+5511999999999\napi_id=11111111\napi_hash=1a1a1a1a1a1a1a1a1a1a1a1a1a1a1a1a\n"


def test_credentials_file(tmp_path):
    path = tmp_path / "creds"
    path.write_text("# account\n" + GOOD_CREDS)
    creds = load_credentials(path)
    assert creds.username == "abc123" and creds.api_id == "11111111"
    assert "1a1a" not in repr(creds)


def test_credentials_from_env():
    env = {"TG_USERNAME": "abc", "TG_PHONE": "+5511999999999", "TG_API_ID": "1", "TG_API_HASH": "f" * 32}
    assert load_credentials(environ=env).phone == "+5511999999999"
    with pytest.raises(ConfigError, match="TG_API_HASH"):
        load_credentials(environ={k: v for k, v in env.items() if k != "TG_API_HASH"})


@pytest.mark.parametrize(
    "line,field",
    [
        ("username=@abc123", "username"),
        ("phone=5511999999999", "phone"),
        ("api_id=12ab", "api_id"),
        ("api_hash=1a1a", "api_hash"),
        ("api_hash=" + "g" * 32, "api_hash"),
    ],
)
def test_bad_credentials(line, field):
    key = line.split("=")[0]
    text = "\n".join(l for l in GOOD_CREDS.splitlines() if not l.startswith(key)) + "\n" + line
    with pytest.raises(ConfigError) as exc:
        parse_credentials(text)
    assert exc.value.field == field
