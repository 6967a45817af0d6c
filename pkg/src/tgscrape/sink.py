"""Archive files: naming, workbook/parquet writers and readers.

Every file written during a run (backup, per-channel partial, final) is a
cumulative snapshot of all records collected so far.

Workbook cells hold at most 32,767 characters. Longer values are cut to that
length, end with ``TRUNCATION_MARKER`` and raise a ``CellTruncatedWarning``.
Parquet keeps them whole, which matters for long comment lists.
"""

from __future__ import annotations

import logging
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import openpyxl
import pyarrow as pa
import pyarrow.parquet as pq

from .config import OutputFormat
from .records import MESSAGE_COLUMNS, MessageRecord

logger = logging.getLogger(__name__)

WORKBOOK_CELL_LIMIT = 32767
TRUNCATION_MARKER = "…[TRUNCATED]"

# Nullable integers are stored as text so an absent value stays absent.
_INT_AS_TEXT = ("Author ID", "Views", "Shares")
_OPTIONAL_TEXT = ("Author",)

PARQUET_SCHEMA = pa.schema(
    [pa.field(c, pa.int64() if c == "Message ID" else pa.string(), nullable=c != "Message ID") for c in MESSAGE_COLUMNS]
)


class CellTruncatedWarning(UserWarning):
    pass


class ArchiveFormatError(ValueError):
    pass


@dataclass
class ArchiveTable:
    rows: list[MessageRecord] = field(default_factory=list)
    columns: tuple[str, ...] = MESSAGE_COLUMNS

    def __len__(self):
        return len(self.rows)


def backup_filename(file_name: str, t_index: int, channel: str, message_id: int, fmt: OutputFormat) -> str:
    return f"backup_{file_name}_until_{t_index:05}_{channel}_ID{message_id:07}.{fmt.extension}"


def partial_filename(channel: str, file_name: str, t_index: int, fmt: OutputFormat) -> str:
    return f"complete_{channel}_in_{file_name}_until_{t_index:05}.{fmt.extension}"


def final_filename(file_name: str, t_index: int, fmt: OutputFormat) -> str:
    return f"FINAL_{file_name}_with_{t_index:05}.{fmt.extension}"


def _to_storage(record: MessageRecord) -> dict:
    row = record.to_dict()
    for col in _INT_AS_TEXT:
        if row[col] is not None:
            row[col] = str(row[col])
    return row


def _from_storage(row: dict) -> MessageRecord:
    row = dict(row)
    for col in MESSAGE_COLUMNS:
        value = row.get(col)
        if col in _INT_AS_TEXT:
            row[col] = None if value in (None, "") else int(value)
        elif col == "Message ID":
            if value is None:
                raise ArchiveFormatError("row without a Message ID")
            row[col] = int(value)
        elif col in _OPTIONAL_TEXT:
            row[col] = None if value is None else str(value)
        else:
            row[col] = "" if value is None else str(value)
    return MessageRecord.from_dict(row)


def fit_cell(value: str) -> tuple[str, bool]:
    if len(value) <= WORKBOOK_CELL_LIMIT:
        return value, False
    keep = WORKBOOK_CELL_LIMIT - len(TRUNCATION_MARKER)
    return value[:keep] + TRUNCATION_MARKER, True


def _atomic(path: Path, write) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _write_parquet(table: ArchiveTable, tmp: str) -> None:
    rows = [_to_storage(r) for r in table.rows]
    arrow = pa.Table.from_pylist(rows, schema=PARQUET_SCHEMA)
    pq.write_table(arrow, tmp)


def _write_workbook(table: ArchiveTable, tmp: str) -> None:
    wb = openpyxl.Workbook(write_only=True)
    ws = wb.create_sheet()
    ws.append(list(MESSAGE_COLUMNS))
    truncated = 0
    for rownum, record in enumerate(table.rows, start=2):
        cells = []
        for col, value in _to_storage(record).items():
            if isinstance(value, str):
                value, cut = fit_cell(value)
                if cut:
                    truncated += 1
                    msg = (
                        f"row {rownum} column {col!r} (message {record.message_id}) exceeds "
                        f"{WORKBOOK_CELL_LIMIT} characters and was truncated; use parquet for the full text"
                    )
                    logger.warning(msg)
                    warnings.warn(msg, CellTruncatedWarning, stacklevel=4)
                cell = openpyxl.cell.WriteOnlyCell(ws, value=value)
                # never let text like "=SUM(...)" become a formula
                cell.data_type = "s"
                cells.append(cell)
            else:
                cells.append(value)
        ws.append(cells)
    wb.save(tmp)


def write_records(table: ArchiveTable, path, fmt: OutputFormat) -> Path:
    path = Path(path)
    writer = _write_parquet if fmt is OutputFormat.PARQUET else _write_workbook
    _atomic(path, lambda tmp: writer(table, tmp))
    return path


def _format_of(path: Path) -> OutputFormat:
    suffix = path.suffix.lower()
    if suffix == ".parquet":
        return OutputFormat.PARQUET
    if suffix == ".xlsx":
        return OutputFormat.WORKBOOK
    raise ArchiveFormatError(f"cannot infer archive format from {path.name!r}")


def read_back(path, fmt: OutputFormat | None = None) -> ArchiveTable:
    path = Path(path)
    fmt = fmt or _format_of(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if fmt is OutputFormat.PARQUET:
        try:
            arrow = pq.read_table(path)
        except pa.ArrowInvalid as e:
            raise ArchiveFormatError(f"{path}: {e}") from None
        if tuple(arrow.column_names) != MESSAGE_COLUMNS:
            raise ArchiveFormatError(f"{path}: unexpected columns {arrow.column_names}")
        return ArchiveTable([_from_storage(r) for r in arrow.to_pylist()])

    try:
        wb = openpyxl.load_workbook(path, read_only=True)
    except Exception as e:
        raise ArchiveFormatError(f"{path}: {e}") from None
    try:
        rows = wb.active.iter_rows(values_only=True)
        header = next(rows, None)
        if header is None or tuple(header) != MESSAGE_COLUMNS:
            raise ArchiveFormatError(f"{path}: unexpected header {header}")
        return ArchiveTable([_from_storage(dict(zip(MESSAGE_COLUMNS, r))) for r in rows])
    finally:
        wb.close()


class ArchiveSink:
    """Writes a run's backups, partials and final file into ``output_dir``."""

    def __init__(self, output_dir, file_name: str, fmt: OutputFormat):
        self.output_dir = Path(output_dir)
        self.file_name = file_name
        self.fmt = fmt
        self.written: list[Path] = []

    def _write(self, name: str, records) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = write_records(ArchiveTable(list(records)), self.output_dir / name, self.fmt)
        self.written.append(path)
        return path

    def write_backup(self, records, t_index: int, channel: str, message_id: int) -> Path:
        return self._write(backup_filename(self.file_name, t_index, channel, message_id, self.fmt), records)

    def write_partial(self, records, channel: str, t_index: int) -> Path:
        return self._write(partial_filename(channel, self.file_name, t_index, self.fmt), records)

    def write_final(self, records, t_index: int) -> Path:
        return self._write(final_filename(self.file_name, t_index, self.fmt), records)
