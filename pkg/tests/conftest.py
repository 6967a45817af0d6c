import json
from datetime import datetime, timezone

import hypothesis
import pytest

from tgscrape.clock import SimulatedClock
from tgscrape.config import ScrapeJobSpec, parse_channel_list, parse_date_window, validate_job, OutputFormat
from tgscrape.source import load_fixture, synthesize_fixture

hypothesis.settings.register_profile("ci", deadline=None, max_examples=100)
hypothesis.settings.load_profile("ci")

WINDOW = (datetime(2024, 10, 15, tzinfo=timezone.utc), datetime(2025, 1, 15, tzinfo=timezone.utc))
FORM_CHANNELS = "@LulanoTelegram, @jairbolsonarobrasil, @Other_Channel_Name"


def utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


def make_job(channels=FORM_CHANNELS, date_min="2024-10-15", date_max="2025-01-15", **kw):
    kw.setdefault("file_name", "Test")
    return validate_job(
        ScrapeJobSpec(
            channels=parse_channel_list(channels),
            window=parse_date_window(date_min, date_max),
            **kw,
        )
    )


def write_fixture(path, doc):
    path.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    return path


@pytest.fixture
def clock():
    return SimulatedClock(start=1_700_000_000.0)


@pytest.fixture
def fixture_file(tmp_path):
    """Factory: write a fixture document and load it as a simulated source."""

    def load(doc, clock=None):
        return load_fixture(write_fixture(tmp_path / "fixture.json", doc), clock=clock)

    return load


@pytest.fixture
def three_channel_fixture():
    return synthesize_fixture(
        [1200, 800, 500],
        WINDOW,
        seed=7,
        handles=[h.strip() for h in FORM_CHANNELS.split(",")],
    )
