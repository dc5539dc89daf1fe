/** Flagged-table rendering: Empty cells and error-prone records are marked
 * visually, and badges derive only from the fetched payload. */

import type { QualityView, RecordView, TableView } from "./types.js";

export interface TableHandlers {
  onCellOpen?: (rid: number, column: string) => void;
  onCellEdit?: (record: RecordView, column: string, value: string) => void;
  onClearFlags?: (record: RecordView) => void;
}

export const FLAG_LABELS: Record<string, string> = {
  empty_cells: "has Empty cells",
  low_relevance: "low quality score",
  unverified_span: "value not found in context",
  degraded: "document processed without model output",
};

function flagBadge(flag: string): HTMLElement {
  const badge = document.createElement("span");
  badge.className = `flag-badge flag-${flag}`;
  badge.textContent = flag.replace(/_/g, " ");
  badge.title = FLAG_LABELS[flag] ?? flag;
  return badge;
}

function beginCellEdit(
  cell: HTMLTableCellElement,
  record: RecordView,
  column: string,
  handlers: TableHandlers,
): void {
  if (cell.querySelector("input")) {
    return;
  }
  const current = record.cells[column];
  const input = document.createElement("input");
  input.type = "text";
  input.className = "cell-editor";
  input.value = current && !current.empty ? current.text : "";
  const previous = [...cell.childNodes];
  cell.replaceChildren(input);
  const restore = () => cell.replaceChildren(...previous);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      handlers.onCellEdit?.(record, column, input.value);
    } else if (event.key === "Escape") {
      restore();
    }
  });
  input.addEventListener("blur", restore);
  input.focus();
}

export function renderTable(
  table: TableView,
  selectedRids: number[] | null,
  handlers: TableHandlers = {},
): HTMLElement {
  const wrapper = document.createElement("div");
  wrapper.className = "data-table";

  const element = document.createElement("table");
  const head = element.createTHead();
  const headRow = head.insertRow();
  for (const label of ["document", "flags"]) {
    const th = document.createElement("th");
    th.textContent = label;
    headRow.appendChild(th);
  }
  for (const column of table.schema.columns) {
    const th = document.createElement("th");
    th.textContent = column.name;
    th.title = column.description;
    headRow.appendChild(th);
  }

  const body = element.createTBody();
  const visible = selectedRids === null ? null : new Set(selectedRids);
  for (const record of table.records) {
    if (visible !== null && !visible.has(record.rid)) {
      continue;
    }
    const row = body.insertRow();
    row.dataset.rid = String(record.rid);
    if (record.flags.length > 0) {
      row.classList.add("row-flagged");
    }

    const docCell = row.insertCell();
    docCell.className = "cell-doc";
    docCell.textContent =
      record.ordinal > 0 ? `${record.doc_id} #${record.ordinal}` : record.doc_id;

    const flagCell = row.insertCell();
    flagCell.className = "cell-flags";
    for (const flag of record.flags) {
      flagCell.appendChild(flagBadge(flag));
    }
    if (record.flags.length > 0 && handlers.onClearFlags) {
      const clear = document.createElement("button");
      clear.type = "button";
      clear.className = "clear-flags";
      clear.textContent = "mark reviewed";
      clear.addEventListener("click", () => handlers.onClearFlags?.(record));
      flagCell.appendChild(clear);
    }

    for (const column of table.schema.columns) {
      const cell = row.insertCell();
      cell.dataset.column = column.name;
      const value = record.cells[column.name];
      if (!value || value.empty) {
        cell.className = "cell-empty";
        const badge = document.createElement("span");
        badge.className = "empty-badge";
        badge.textContent = "Empty";
        cell.appendChild(badge);
      } else {
        cell.textContent = value.text;
      }
      cell.addEventListener("click", () => handlers.onCellOpen?.(record.rid, column.name));
      cell.addEventListener("dblclick", (event) => {
        event.stopPropagation();
        beginCellEdit(cell, record, column.name, handlers);
      });
    }
  }

  wrapper.appendChild(element);
  return wrapper;
}

function formatRatio(value: number | null): string {
  return value === null ? "n/a" : `${(value * 100).toFixed(1)}%`;
}

/** Compact overview of table quality; re-rendered after every mutation. */
export function renderStats(quality: QualityView | null, degradedDocs: string[]): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "stats-panel";
  if (degradedDocs.length > 0) {
    const warning = document.createElement("div");
    warning.className = "stat stat-degraded";
    warning.textContent = `${degradedDocs.length} document(s) degraded: ${degradedDocs.join(", ")}`;
    panel.appendChild(warning);
  }
  if (!quality) {
    return panel;
  }
  const missing = document.createElement("div");
  missing.className = "stat stat-missingness";
  missing.textContent = `missingness ${formatRatio(quality.missingness)}`;
  panel.appendChild(missing);
  for (const [column, value] of Object.entries(quality.column_inconsistency)) {
    const stat = document.createElement("div");
    stat.className = "stat stat-inconsistency";
    stat.dataset.column = column;
    stat.textContent = `${column}: inconsistency ${formatRatio(value)}`;
    panel.appendChild(stat);
  }
  return panel;
}
