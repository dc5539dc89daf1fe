/** Group cards over the draft standardization plan: every value variant is a
 * draggable chip, dropping it on another card moves it in the local draft. */

import type { FrequencyTier, GroupingView, PlanPayload } from "./types.js";

export interface GroupCardHandlers {
  onMove?: (variant: string, fromGroup: string, toGroup: string) => void;
  onRename?: (oldName: string, newName: string) => void;
  onCreate?: (name: string) => void;
  onRemove?: (name: string) => void;
  onSetCanonical?: (group: string, value: string) => void;
  onApply?: () => void;
}

interface DragPayload {
  variant: string;
  from: string;
}

/* dataTransfer is unavailable during dragover in some engines, so the active
 * drag is also tracked module-locally. */
let currentDrag: DragPayload | null = null;

function quantile(sorted: number[], q: number): number {
  const h = (sorted.length - 1) * q;
  const lo = Math.floor(h);
  const hi = Math.min(lo + 1, sorted.length - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

/** Tercile tiers over occurrence counts; ties take the lower tier. */
export function frequencyTiers(counts: number[]): FrequencyTier[] {
  if (counts.length === 0) {
    return [];
  }
  const sorted = [...counts].sort((a, b) => a - b);
  if (sorted[0] === sorted[sorted.length - 1]) {
    return counts.map(() => "medium");
  }
  const q1 = quantile(sorted, 1 / 3);
  const q2 = quantile(sorted, 2 / 3);
  return counts.map((value) => (value <= q1 ? "low" : value <= q2 ? "medium" : "high"));
}

/** variant text → occurrence count, collected from the grouping result. */
export function variantCounts(grouping: GroupingView | null): Map<string, number> {
  const counts = new Map<string, number>();
  if (!grouping) {
    return counts;
  }
  for (const cluster of grouping.clusters) {
    for (const [variant, count] of Object.entries(cluster.members)) {
      counts.set(variant, count);
    }
  }
  return counts;
}

function readDragPayload(event: DragEvent): DragPayload | null {
  const raw = event.dataTransfer?.getData("text/plain");
  if (raw) {
    try {
      const parsed = JSON.parse(raw) as DragPayload;
      if (typeof parsed.variant === "string" && typeof parsed.from === "string") {
        return parsed;
      }
    } catch {
      // fall through to the module-local payload
    }
  }
  return currentDrag;
}

function variantChip(
  variant: string,
  group: string,
  count: number,
  tier: FrequencyTier,
  canonical: string,
): HTMLElement {
  const chip = document.createElement("li");
  chip.className = `variant-chip tier-${tier}`;
  chip.draggable = true;
  chip.dataset.variant = variant;
  if (variant === canonical) {
    chip.classList.add("variant-canonical");
  }
  const text = document.createElement("span");
  text.className = "variant-text";
  text.textContent = variant;
  chip.appendChild(text);
  const badge = document.createElement("span");
  badge.className = "variant-count";
  badge.textContent = `x${count}`;
  chip.appendChild(badge);
  chip.addEventListener("dragstart", (event: DragEvent) => {
    currentDrag = { variant, from: group };
    event.dataTransfer?.setData("text/plain", JSON.stringify(currentDrag));
  });
  chip.addEventListener("dragend", () => {
    currentDrag = null;
  });
  return chip;
}

function groupCard(
  name: string,
  draft: PlanPayload,
  counts: Map<string, number>,
  tierOf: Map<string, FrequencyTier>,
  handlers: GroupCardHandlers,
): HTMLElement {
  const card = document.createElement("section");
  card.className = "group-card";
  card.dataset.group = name;

  const header = document.createElement("div");
  header.className = "group-header";
  const nameInput = document.createElement("input");
  nameInput.type = "text";
  nameInput.className = "group-name";
  nameInput.value = name;
  nameInput.addEventListener("change", () => {
    if (nameInput.value.trim() && nameInput.value.trim() !== name) {
      handlers.onRename?.(name, nameInput.value);
    } else {
      nameInput.value = name;
    }
  });
  header.appendChild(nameInput);
  const variants = draft.groups[name] ?? [];
  if (variants.length === 0 && handlers.onRemove) {
    const remove = document.createElement("button");
    remove.type = "button";
    remove.className = "group-remove";
    remove.textContent = "remove";
    remove.addEventListener("click", () => handlers.onRemove?.(name));
    header.appendChild(remove);
  }
  card.appendChild(header);

  const canonicalRow = document.createElement("label");
  canonicalRow.className = "group-canonical";
  canonicalRow.textContent = "canonical ";
  const canonicalInput = document.createElement("input");
  canonicalInput.type = "text";
  canonicalInput.value = draft.canonical[name] ?? "";
  canonicalInput.addEventListener("change", () =>
    handlers.onSetCanonical?.(name, canonicalInput.value),
  );
  canonicalRow.appendChild(canonicalInput);
  card.appendChild(canonicalRow);

  const list = document.createElement("ul");
  list.className = "variant-list";
  for (const variant of variants) {
    const count = counts.get(variant) ?? 1;
    const tier = tierOf.get(variant) ?? "medium";
    list.appendChild(variantChip(variant, name, count, tier, draft.canonical[name] ?? ""));
  }
  card.appendChild(list);

  card.addEventListener("dragover", (event) => event.preventDefault());
  card.addEventListener("drop", (event: DragEvent) => {
    event.preventDefault();
    const payload = readDragPayload(event);
    currentDrag = null;
    if (payload && payload.from !== name) {
      handlers.onMove?.(payload.variant, payload.from, name);
    }
  });
  return card;
}

export function renderGroupCards(
  draft: PlanPayload,
  grouping: GroupingView | null,
  errors: string[],
  handlers: GroupCardHandlers = {},
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "group-panel";

  const heading = document.createElement("div");
  heading.className = "group-panel-title";
  heading.textContent = `standardize ${draft.column}`;
  panel.appendChild(heading);

  const counts = variantCounts(grouping);
  const allVariants = Object.values(draft.groups).flat();
  const tiers = frequencyTiers(allVariants.map((v) => counts.get(v) ?? 1));
  const tierOf = new Map<string, FrequencyTier>();
  allVariants.forEach((variant, i) => tierOf.set(variant, tiers[i]));

  const cards = document.createElement("div");
  cards.className = "group-cards";
  for (const name of Object.keys(draft.groups)) {
    cards.appendChild(groupCard(name, draft, counts, tierOf, handlers));
  }
  panel.appendChild(cards);

  const creator = document.createElement("div");
  creator.className = "group-create";
  const nameInput = document.createElement("input");
  nameInput.type = "text";
  nameInput.placeholder = "new group name";
  creator.appendChild(nameInput);
  const createButton = document.createElement("button");
  createButton.type = "button";
  createButton.textContent = "new group";
  createButton.addEventListener("click", () => {
    if (nameInput.value.trim()) {
      handlers.onCreate?.(nameInput.value);
      nameInput.value = "";
    }
  });
  creator.appendChild(createButton);
  panel.appendChild(creator);

  if (errors.length > 0) {
    const list = document.createElement("ul");
    list.className = "plan-errors";
    for (const error of errors) {
      const item = document.createElement("li");
      item.textContent = error;
      list.appendChild(item);
    }
    panel.appendChild(list);
  }

  const apply = document.createElement("button");
  apply.type = "button";
  apply.className = "plan-apply";
  apply.textContent = "apply plan";
  apply.disabled = errors.length > 0;
  apply.addEventListener("click", () => {
    if (!apply.disabled) {
      handlers.onApply?.();
    }
  });
  panel.appendChild(apply);

  return panel;
}
