/** Client-side view state and the draft standardization-plan algebra.
 *
 * Draft edits are purely local; nothing reaches the service until the draft
 * is applied, and every mutation request carries the current revision token.
 */

import type {
  ContextsView,
  GroupingView,
  PlanPayload,
  TableView,
} from "./types.js";

export interface Banner {
  kind: "info" | "error" | "conflict";
  message: string;
}

export interface ViewState {
  collectionId: string | null;
  queryId: string | null;
  revision: number;
  table: TableView | null;
  selectedColumns: string[];
  grouping: GroupingView | null;
  draftPlan: PlanPayload | null;
  /** Record ids picked out by a scatter selection; null means no filter. */
  selectedRids: number[] | null;
  contexts: ContextsView | null;
  contextColumn: string | null;
  banner: Banner | null;
}

export function initialState(): ViewState {
  return {
    collectionId: null,
    queryId: null,
    revision: 0,
    table: null,
    selectedColumns: [],
    grouping: null,
    draftPlan: null,
    selectedRids: null,
    contexts: null,
    contextColumn: null,
    banner: null,
  };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

/** Trim and lowercase, matching how the service compares value variants. */
export function normalizeValue(value: string): string {
  return value.trim().toLowerCase();
}

export function clonePlan(plan: PlanPayload): PlanPayload {
  return {
    column: plan.column,
    groups: Object.fromEntries(
      Object.entries(plan.groups).map(([name, variants]) => [name, [...variants]]),
    ),
    canonical: { ...plan.canonical },
  };
}

/** Move one variant between groups; returns a new draft, the input untouched. */
export function moveVariant(
  plan: PlanPayload,
  variant: string,
  fromGroup: string,
  toGroup: string,
): PlanPayload {
  if (fromGroup === toGroup) {
    return clonePlan(plan);
  }
  const next = clonePlan(plan);
  const source = next.groups[fromGroup];
  const target = next.groups[toGroup];
  if (!source || !target) {
    throw new Error(`unknown group ${source ? toGroup : fromGroup}`);
  }
  const index = source.indexOf(variant);
  if (index < 0) {
    throw new Error(`variant ${variant} is not in group ${fromGroup}`);
  }
  source.splice(index, 1);
  target.push(variant);
  const canonical = next.canonical[fromGroup];
  if (canonical !== undefined && normalizeValue(canonical) === normalizeValue(variant)) {
    next.canonical[fromGroup] = source[0] ?? "";
  }
  return next;
}

/** Rename a group label; membership and canonical value carry over unchanged. */
export function renameGroup(
  plan: PlanPayload,
  oldName: string,
  newName: string,
): PlanPayload {
  const trimmed = newName.trim();
  if (!trimmed) {
    throw new Error("group name must not be blank");
  }
  if (trimmed !== oldName && trimmed in plan.groups) {
    throw new Error(`group ${trimmed} already exists`);
  }
  const next: PlanPayload = { column: plan.column, groups: {}, canonical: {} };
  for (const [name, variants] of Object.entries(plan.groups)) {
    const label = name === oldName ? trimmed : name;
    next.groups[label] = [...variants];
  }
  for (const [name, value] of Object.entries(plan.canonical)) {
    next.canonical[name === oldName ? trimmed : name] = value;
  }
  return next;
}

export function createGroup(plan: PlanPayload, name: string): PlanPayload {
  const trimmed = name.trim();
  if (!trimmed) {
    throw new Error("group name must not be blank");
  }
  if (trimmed in plan.groups) {
    throw new Error(`group ${trimmed} already exists`);
  }
  const next = clonePlan(plan);
  next.groups[trimmed] = [];
  next.canonical[trimmed] = "";
  return next;
}

export function setCanonical(
  plan: PlanPayload,
  group: string,
  value: string,
): PlanPayload {
  if (!(group in plan.groups)) {
    throw new Error(`unknown group ${group}`);
  }
  const next = clonePlan(plan);
  next.canonical[group] = value;
  return next;
}

export function removeGroup(plan: PlanPayload, name: string): PlanPayload {
  const members = plan.groups[name];
  if (members === undefined) {
    throw new Error(`unknown group ${name}`);
  }
  if (members.length > 0) {
    throw new Error(`group ${name} still has ${members.length} variants`);
  }
  const next = clonePlan(plan);
  delete next.groups[name];
  delete next.canonical[name];
  return next;
}

/** Mirror of the service's plan checks; a nonempty result blocks apply. */
export function validatePlan(plan: PlanPayload): string[] {
  const errors: string[] = [];
  if (!plan.column) {
    errors.push("plan has no target column");
  }
  const owner: Record<string, string> = {};
  for (const [group, variants] of Object.entries(plan.groups)) {
    for (const variant of variants) {
      const key = normalizeValue(variant);
      if (key in owner && owner[key] !== group) {
        errors.push(`variant "${variant}" appears in both "${owner[key]}" and "${group}"`);
        continue;
      }
      owner[key] = group;
    }
  }
  for (const [group, canonical] of Object.entries(plan.canonical)) {
    if (!canonical.trim()) {
      continue;
    }
    const key = normalizeValue(canonical);
    if (key in owner && owner[key] !== group) {
      errors.push(
        `canonical "${canonical}" of group "${group}" is a variant of group "${owner[key]}"`,
      );
    }
  }
  return errors;
}

/** Parse an "attribute: description" form, one attribute per line. */
export function parseAttributeForm(text: string): Record<string, string> {
  const attributes: Record<string, string> = {};
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    const split = trimmed.indexOf(":");
    const name = split < 0 ? trimmed : trimmed.slice(0, split).trim();
    const description = split < 0 ? "" : trimmed.slice(split + 1).trim();
    if (name) {
      attributes[name] = description;
    }
  }
  return attributes;
}
