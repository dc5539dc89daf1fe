"""Working table and accumulated database with merge, export, and persistence."""
from .database import (
    CHANGELOG_FILE,
    MERGE_POLICIES,
    SNAPSHOT_FILE,
    SNAPSHOT_VERSION,
    Database,
    SingleWriterLock,
    export_csv,
    load,
    merge_into_db,
    parse_csv,
    persist,
)
from .working import (
    ACTORS,
    ChangeLogEntry,
    WorkingTable,
    clear_flags,
    edit_cell,
    refresh_flags,
)

__all__ = [
    "ACTORS",
    "CHANGELOG_FILE",
    "MERGE_POLICIES",
    "SNAPSHOT_FILE",
    "SNAPSHOT_VERSION",
    "ChangeLogEntry",
    "Database",
    "SingleWriterLock",
    "WorkingTable",
    "clear_flags",
    "edit_cell",
    "export_csv",
    "load",
    "merge_into_db",
    "parse_csv",
    "persist",
    "refresh_flags",
]
