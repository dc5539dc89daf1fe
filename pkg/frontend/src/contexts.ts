/** Provenance rendering: retrieved chunks with highlighted evidence spans,
 * plus a source viewer over the bundle content the engine actually used. */

import type { ContextsView, SpanView } from "./types.js";

export interface ContextHandlers {
  onJumpToSource?: (chunkId: string) => void;
}

interface Interval {
  start: number;
  end: number;
}

/** Merge overlapping or touching spans into disjoint intervals, sorted. */
export function mergeIntervals(spans: SpanView[]): Interval[] {
  const sorted = spans
    .map((s) => ({ start: s.char_start, end: s.char_end }))
    .filter((s) => s.end > s.start)
    .sort((a, b) => a.start - b.start || a.end - b.end);
  const merged: Interval[] = [];
  for (const span of sorted) {
    const last = merged[merged.length - 1];
    if (last && span.start <= last.end) {
      last.end = Math.max(last.end, span.end);
    } else {
      merged.push({ ...span });
    }
  }
  return merged;
}

/** The chunk text as nodes, with every span interval wrapped in <mark>. */
export function highlightFragment(content: string, spans: SpanView[]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  let cursor = 0;
  for (const { start, end } of mergeIntervals(spans)) {
    const lo = Math.max(0, Math.min(start, content.length));
    const hi = Math.max(lo, Math.min(end, content.length));
    if (lo > cursor) {
      fragment.appendChild(document.createTextNode(content.slice(cursor, lo)));
    }
    const mark = document.createElement("mark");
    mark.textContent = content.slice(lo, hi);
    fragment.appendChild(mark);
    cursor = hi;
  }
  if (cursor < content.length) {
    fragment.appendChild(document.createTextNode(content.slice(cursor)));
  }
  return fragment;
}

function chunkHeader(
  chunkId: string,
  kind: string,
  handlers: ContextHandlers,
): HTMLElement {
  const header = document.createElement("div");
  header.className = "chunk-header";
  const kindTag = document.createElement("span");
  kindTag.className = `chunk-kind chunk-kind-${kind}`;
  kindTag.textContent = kind;
  header.appendChild(kindTag);
  const jump = document.createElement("button");
  jump.type = "button";
  jump.className = "chunk-jump";
  jump.textContent = chunkId;
  jump.title = "show in source viewer";
  jump.addEventListener("click", () => handlers.onJumpToSource?.(chunkId));
  header.appendChild(jump);
  return header;
}

/** Popover for one cell: its evidence spans inside the cited chunks. */
export function renderCellContexts(
  view: ContextsView,
  column: string,
  cellEmpty: boolean,
  handlers: ContextHandlers = {},
): HTMLElement {
  const popover = document.createElement("div");
  popover.className = "context-popover";

  const title = document.createElement("div");
  title.className = "popover-title";
  title.textContent = `${view.doc_id} / ${column}`;
  popover.appendChild(title);

  if (cellEmpty) {
    const note = document.createElement("p");
    note.className = "popover-empty";
    note.textContent = "No value was extracted for this column from the retrieved context.";
    popover.appendChild(note);
    return popover;
  }

  const spans = view.spans[column] ?? [];
  if (spans.length === 0) {
    const warning = document.createElement("p");
    warning.className = "popover-unverified";
    warning.textContent =
      "The extracted value could not be located verbatim in the retrieved context; verify it against the source.";
    popover.appendChild(warning);
    return popover;
  }

  const byChunk = new Map<string, SpanView[]>();
  for (const span of spans) {
    const bucket = byChunk.get(span.chunk_id) ?? [];
    bucket.push(span);
    byChunk.set(span.chunk_id, bucket);
  }
  for (const [chunkId, chunkSpans] of byChunk) {
    const chunk = view.contexts.find((c) => c.chunk_id === chunkId);
    const section = document.createElement("section");
    section.className = "popover-chunk";
    section.dataset.chunkId = chunkId;
    if (chunk) {
      section.appendChild(chunkHeader(chunkId, chunk.kind, handlers));
      const content = document.createElement("pre");
      content.className = "chunk-content";
      content.appendChild(highlightFragment(chunk.raw_content, chunkSpans));
      section.appendChild(content);
    } else {
      const missing = document.createElement("p");
      missing.className = "popover-unverified";
      missing.textContent = `cited chunk ${chunkId} is not in the retrieved context`;
      section.appendChild(missing);
    }
    popover.appendChild(section);
  }
  return popover;
}

/** Full bundle-content view for a record's retrieved chunks. */
export function renderSourceViewer(
  view: ContextsView,
  focusChunkId: string | null,
  handlers: ContextHandlers = {},
): HTMLElement {
  const viewer = document.createElement("div");
  viewer.className = "source-viewer";
  const title = document.createElement("div");
  title.className = "viewer-title";
  title.textContent = `retrieved context for ${view.doc_id}`;
  viewer.appendChild(title);
  for (const chunk of view.contexts) {
    const section = document.createElement("section");
    section.className = "viewer-chunk";
    section.dataset.chunkId = chunk.chunk_id;
    if (chunk.chunk_id === focusChunkId) {
      section.classList.add("viewer-chunk-focus");
    }
    section.appendChild(chunkHeader(chunk.chunk_id, chunk.kind, handlers));
    const summary = document.createElement("p");
    summary.className = "chunk-summary";
    summary.textContent = chunk.summary;
    section.appendChild(summary);
    const content = document.createElement("pre");
    content.className = "chunk-content";
    content.textContent = chunk.raw_content;
    section.appendChild(content);
    viewer.appendChild(section);
  }
  return viewer;
}
