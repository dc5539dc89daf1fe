/** Single-page layout wiring the five regions together: query panel, table
 * review, context popover, source viewer, and the standardization panel.
 * The page holds no private state channel to the engine; every change goes
 * through the HTTP API and carries the latest revision token. */

import { ApiClient, ApiError } from "./api.js";
import {
  renderCellContexts,
  renderSourceViewer,
} from "./contexts.js";
import { renderGroupCards } from "./groups.js";
import { renderScatter } from "./scatter.js";
import {
  clonePlan,
  createGroup,
  moveVariant,
  parseAttributeForm,
  removeGroup,
  renameGroup,
  setCanonical,
  Store,
  validatePlan,
} from "./state.js";
import { renderStats, renderTable } from "./table.js";
import type { RecordView } from "./types.js";

export interface AppOptions {
  pollIntervalMs?: number;
}

function section(className: string, title: string): HTMLElement {
  const element = document.createElement("section");
  element.className = `region ${className}`;
  const heading = document.createElement("h2");
  heading.textContent = title;
  element.appendChild(heading);
  return element;
}

export class App {
  readonly store = new Store();
  private readonly client: ApiClient;
  private readonly pollIntervalMs: number;
  private focusChunk: string | null = null;

  private banner!: HTMLElement;
  private collectionLabel!: HTMLElement;
  private questionInput!: HTMLInputElement;
  private attributesInput!: HTMLTextAreaElement;
  private submitButton!: HTMLButtonElement;
  private progress!: HTMLElement;
  private statsHost!: HTMLElement;
  private tableHost!: HTMLElement;
  private popoverHost!: HTMLElement;
  private sourceHost!: HTMLElement;
  private columnsHost!: HTMLElement;
  private scatterHost!: HTMLElement;
  private cardsHost!: HTMLElement;
  private csvLink!: HTMLAnchorElement;
  private mergeStatus!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    client?: ApiClient,
    options: AppOptions = {},
  ) {
    this.client = client ?? new ApiClient();
    this.pollIntervalMs = options.pollIntervalMs ?? 400;
    this.buildShell();
    this.store.subscribe(() => this.render());
  }

  // -- static shell ----------------------------------------------------------

  private buildShell(): void {
    this.root.replaceChildren();
    this.root.className = "papertab-ui";

    this.banner = document.createElement("div");
    this.banner.className = "banner";
    this.banner.hidden = true;
    this.root.appendChild(this.banner);

    const query = section("region-query", "query");
    this.collectionLabel = document.createElement("div");
    this.collectionLabel.className = "collection-label";
    this.collectionLabel.textContent = "no collection yet";
    query.appendChild(this.collectionLabel);

    const collectionRow = document.createElement("div");
    collectionRow.className = "collection-row";
    const collectionInput = document.createElement("input");
    collectionInput.type = "text";
    collectionInput.placeholder = "collection id (optional)";
    collectionInput.className = "collection-id";
    collectionRow.appendChild(collectionInput);
    const createButton = document.createElement("button");
    createButton.type = "button";
    createButton.textContent = "create collection";
    createButton.addEventListener("click", () => {
      void this.createCollection(collectionInput.value.trim() || undefined);
    });
    collectionRow.appendChild(createButton);
    query.appendChild(collectionRow);

    const bundlesRow = document.createElement("div");
    bundlesRow.className = "bundles-row";
    const bundlesInput = document.createElement("textarea");
    bundlesInput.className = "bundles-json";
    bundlesInput.placeholder = 'parsed document bundles as a JSON array: [{"doc_id": ...}]';
    bundlesRow.appendChild(bundlesInput);
    const ingestButton = document.createElement("button");
    ingestButton.type = "button";
    ingestButton.textContent = "add documents";
    ingestButton.addEventListener("click", () => {
      void this.ingestBundles(bundlesInput.value);
    });
    bundlesRow.appendChild(ingestButton);
    query.appendChild(bundlesRow);

    this.questionInput = document.createElement("input");
    this.questionInput.type = "text";
    this.questionInput.className = "question-input";
    this.questionInput.placeholder = "ask a question about the collection";
    query.appendChild(this.questionInput);

    this.attributesInput = document.createElement("textarea");
    this.attributesInput.className = "attributes-input";
    this.attributesInput.placeholder = "or list attributes, one per line: name: description";
    query.appendChild(this.attributesInput);

    this.submitButton = document.createElement("button");
    this.submitButton.type = "button";
    this.submitButton.className = "submit-query";
    this.submitButton.textContent = "run query";
    this.submitButton.disabled = true;
    this.submitButton.addEventListener("click", () => {
      void this.submitQuery();
    });
    query.appendChild(this.submitButton);

    const syncSubmit = () => {
      this.submitButton.disabled =
        !this.questionInput.value.trim() && !this.attributesInput.value.trim();
    };
    this.questionInput.addEventListener("input", syncSubmit);
    this.attributesInput.addEventListener("input", syncSubmit);

    this.progress = document.createElement("span");
    this.progress.className = "job-progress";
    query.appendChild(this.progress);
    this.root.appendChild(query);

    const tableRegion = section("region-table", "extracted table");
    this.statsHost = document.createElement("div");
    tableRegion.appendChild(this.statsHost);
    this.tableHost = document.createElement("div");
    tableRegion.appendChild(this.tableHost);

    const mergeRow = document.createElement("div");
    mergeRow.className = "merge-row";
    const policySelect = document.createElement("select");
    policySelect.className = "merge-policy";
    for (const policy of ["incoming_wins", "keep_existing", "fail"]) {
      const option = document.createElement("option");
      option.value = policy;
      option.textContent = policy;
      policySelect.appendChild(option);
    }
    mergeRow.appendChild(policySelect);
    const mergeButton = document.createElement("button");
    mergeButton.type = "button";
    mergeButton.className = "merge-button";
    mergeButton.textContent = "add to database";
    mergeButton.addEventListener("click", () => {
      void this.merge(policySelect.value);
    });
    mergeRow.appendChild(mergeButton);
    this.csvLink = document.createElement("a");
    this.csvLink.className = "csv-link";
    this.csvLink.textContent = "download db.csv";
    this.csvLink.hidden = true;
    mergeRow.appendChild(this.csvLink);
    this.mergeStatus = document.createElement("span");
    this.mergeStatus.className = "merge-status";
    mergeRow.appendChild(this.mergeStatus);
    tableRegion.appendChild(mergeRow);
    this.root.appendChild(tableRegion);

    const contextRegion = section("region-context", "evidence");
    this.popoverHost = document.createElement("div");
    contextRegion.appendChild(this.popoverHost);
    this.root.appendChild(contextRegion);

    const sourceRegion = section("region-source", "source");
    this.sourceHost = document.createElement("div");
    sourceRegion.appendChild(this.sourceHost);
    this.root.appendChild(sourceRegion);

    const groupsRegion = section("region-groups", "standardize");
    this.columnsHost = document.createElement("div");
    this.columnsHost.className = "column-picker";
    groupsRegion.appendChild(this.columnsHost);
    this.scatterHost = document.createElement("div");
    groupsRegion.appendChild(this.scatterHost);
    this.cardsHost = document.createElement("div");
    groupsRegion.appendChild(this.cardsHost);
    this.root.appendChild(groupsRegion);
  }

  // -- actions ---------------------------------------------------------------

  private fail(error: unknown): void {
    if (error instanceof ApiError && error.status === 409) {
      this.store.update({
        banner: {
          kind: "conflict",
          message: `${error.message}; reloading the latest revision, please re-check your edit`,
        },
      });
      void this.refreshTable();
      return;
    }
    const message =
      error instanceof ApiError && error.degraded
        ? `model backend unavailable, results degraded: ${error.message}`
        : error instanceof Error
          ? error.message
          : String(error);
    this.store.update({ banner: { kind: "error", message } });
  }

  async createCollection(collectionId?: string): Promise<void> {
    try {
      const created = await this.client.createCollection(collectionId);
      this.store.update({
        collectionId: created.collection_id,
        banner: { kind: "info", message: `collection ${created.collection_id} ready` },
      });
    } catch (error) {
      this.fail(error);
    }
  }

  async ingestBundles(json: string): Promise<void> {
    const collectionId = this.store.get().collectionId;
    if (!collectionId) {
      this.fail(new Error("create a collection first"));
      return;
    }
    try {
      const bundles = JSON.parse(json) as unknown[];
      if (!Array.isArray(bundles)) {
        throw new Error("bundles must be a JSON array");
      }
      this.progress.textContent = "indexing documents...";
      const accepted = await this.client.addBundles(collectionId, bundles);
      await this.client.waitForJob(accepted.job_id, { intervalMs: this.pollIntervalMs });
      this.progress.textContent = "";
      this.store.update({
        banner: {
          kind: "info",
          message: `indexed ${accepted.accepted_documents.length} document(s)`,
        },
      });
    } catch (error) {
      this.progress.textContent = "";
      this.fail(error);
    }
  }

  async submitQuery(): Promise<void> {
    const collectionId = this.store.get().collectionId;
    if (!collectionId) {
      this.fail(new Error("create a collection first"));
      return;
    }
    const question = this.questionInput.value.trim();
    const attributes = parseAttributeForm(this.attributesInput.value);
    if (!question && Object.keys(attributes).length === 0) {
      return;
    }
    try {
      this.submitButton.disabled = true;
      this.progress.textContent = "running query...";
      const submitted = await this.client.submitQuery(
        collectionId,
        question ? { question } : { attributes },
      );
      await this.client.waitForJob(submitted.job_id, { intervalMs: this.pollIntervalMs });
      this.store.update({
        queryId: submitted.query_id,
        grouping: null,
        draftPlan: null,
        selectedRids: null,
        contexts: null,
        contextColumn: null,
      });
      await this.refreshTable();
      const table = this.store.get().table;
      if (table && table.degraded_docs.length > 0) {
        this.store.update({
          banner: {
            kind: "error",
            message: `${table.degraded_docs.length} document(s) degraded during extraction`,
          },
        });
      } else {
        this.store.update({ banner: null });
      }
    } catch (error) {
      this.fail(error);
    } finally {
      this.progress.textContent = "";
      this.submitButton.disabled = false;
    }
  }

  async refreshTable(): Promise<void> {
    const queryId = this.store.get().queryId;
    if (!queryId) {
      return;
    }
    const table = await this.client.table(queryId);
    this.store.update({ table, revision: table.revision });
  }

  async openCell(rid: number, column: string): Promise<void> {
    const queryId = this.store.get().queryId;
    if (!queryId) {
      return;
    }
    try {
      const contexts = await this.client.contexts(queryId, rid);
      this.focusChunk = null;
      this.store.update({ contexts, contextColumn: column });
    } catch (error) {
      this.fail(error);
    }
  }

  async editCell(record: RecordView, column: string, value: string): Promise<void> {
    const { queryId, revision } = this.store.get();
    if (!queryId) {
      return;
    }
    try {
      await this.client.editCell(queryId, {
        revision,
        doc_id: record.doc_id,
        ordinal: record.ordinal,
        column,
        value: value.trim() ? value : null,
      });
      await this.refreshTable();
    } catch (error) {
      this.fail(error);
    }
  }

  async clearFlags(record: RecordView): Promise<void> {
    const { queryId, revision } = this.store.get();
    if (!queryId) {
      return;
    }
    try {
      await this.client.clearFlags(queryId, revision, record.doc_id, record.ordinal);
      await this.refreshTable();
    } catch (error) {
      this.fail(error);
    }
  }

  async groupValues(columns: string[]): Promise<void> {
    const queryId = this.store.get().queryId;
    if (!queryId || columns.length === 0) {
      return;
    }
    try {
      const response = await this.client.groups(queryId, columns);
      this.store.update({
        selectedColumns: columns,
        grouping: response.grouping,
        draftPlan: response.plan ? clonePlan(response.plan) : null,
        revision: response.revision,
        selectedRids: null,
      });
    } catch (error) {
      this.fail(error);
    }
  }

  async applyDraft(): Promise<void> {
    const { queryId, revision, draftPlan, selectedColumns } = this.store.get();
    if (!queryId || !draftPlan || validatePlan(draftPlan).length > 0) {
      return;
    }
    try {
      const applied = await this.client.applyPlan(queryId, revision, draftPlan);
      this.store.update({
        revision: applied.revision,
        banner: {
          kind: "info",
          message: `standardized ${applied.report.changes.length} cell(s) in ${applied.report.column}`,
        },
      });
      await this.refreshTable();
      if (selectedColumns.length > 0) {
        await this.groupValues(selectedColumns);
      }
    } catch (error) {
      this.fail(error);
    }
  }

  private editDraft(edit: () => void): void {
    try {
      edit();
    } catch (error) {
      this.fail(error);
    }
  }

  async merge(policy: string): Promise<void> {
    const { collectionId, queryId } = this.store.get();
    if (!collectionId || !queryId) {
      this.fail(new Error("run a query first"));
      return;
    }
    try {
      const merged = await this.client.mergeDb(collectionId, queryId, policy);
      this.mergeStatus.textContent = `database has ${merged.rows} row(s)`;
      this.store.update({
        banner: { kind: "info", message: `merged into the database (${merged.rows} rows)` },
      });
    } catch (error) {
      this.fail(error);
    }
  }

  // -- rendering -------------------------------------------------------------

  private render(): void {
    const state = this.store.get();

    if (state.banner) {
      this.banner.hidden = false;
      this.banner.className = `banner banner-${state.banner.kind}`;
      this.banner.textContent = state.banner.message;
    } else {
      this.banner.hidden = true;
      this.banner.textContent = "";
    }

    this.collectionLabel.textContent = state.collectionId
      ? `collection: ${state.collectionId}`
      : "no collection yet";
    if (state.collectionId) {
      this.csvLink.hidden = false;
      this.csvLink.href = this.client.dbCsvUrl(state.collectionId);
    }

    this.statsHost.replaceChildren(
      state.table
        ? renderStats(state.table.quality, state.table.degraded_docs)
        : document.createElement("div"),
    );
    if (state.table) {
      this.tableHost.replaceChildren(
        renderTable(state.table, state.selectedRids, {
          onCellOpen: (rid, column) => void this.openCell(rid, column),
          onCellEdit: (record, column, value) => void this.editCell(record, column, value),
          onClearFlags: (record) => void this.clearFlags(record),
        }),
      );
      this.renderColumnPicker();
    } else {
      this.tableHost.replaceChildren();
      this.columnsHost.replaceChildren();
    }

    if (state.contexts && state.contextColumn && state.table) {
      const record = state.table.records[state.contexts.rid];
      const cell = record?.cells[state.contextColumn];
      this.popoverHost.replaceChildren(
        renderCellContexts(state.contexts, state.contextColumn, !cell || cell.empty, {
          onJumpToSource: (chunkId) => {
            this.focusChunk = chunkId;
            this.renderSource();
          },
        }),
      );
      this.renderSource();
    } else {
      this.popoverHost.replaceChildren();
      this.sourceHost.replaceChildren();
    }

    if (state.grouping) {
      this.scatterHost.replaceChildren(
        renderScatter(state.grouping, {
          onSelect: (rids) => this.store.update({ selectedRids: rids }),
        }),
      );
    } else {
      this.scatterHost.replaceChildren();
    }

    if (state.draftPlan) {
      const draft = state.draftPlan;
      this.cardsHost.replaceChildren(
        renderGroupCards(draft, state.grouping, validatePlan(draft), {
          onMove: (variant, from, to) =>
            this.editDraft(() =>
              this.store.update({ draftPlan: moveVariant(draft, variant, from, to) }),
            ),
          onRename: (oldName, newName) =>
            this.editDraft(() =>
              this.store.update({ draftPlan: renameGroup(draft, oldName, newName) }),
            ),
          onCreate: (name) =>
            this.editDraft(() => this.store.update({ draftPlan: createGroup(draft, name) })),
          onRemove: (name) =>
            this.editDraft(() => this.store.update({ draftPlan: removeGroup(draft, name) })),
          onSetCanonical: (group, value) =>
            this.editDraft(() =>
              this.store.update({ draftPlan: setCanonical(draft, group, value) }),
            ),
          onApply: () => void this.applyDraft(),
        }),
      );
    } else {
      this.cardsHost.replaceChildren();
    }
  }

  private renderSource(): void {
    const state = this.store.get();
    if (!state.contexts) {
      this.sourceHost.replaceChildren();
      return;
    }
    this.sourceHost.replaceChildren(
      renderSourceViewer(state.contexts, this.focusChunk, {
        onJumpToSource: (chunkId) => {
          this.focusChunk = chunkId;
          this.renderSource();
        },
      }),
    );
  }

  private renderColumnPicker(): void {
    const state = this.store.get();
    if (!state.table) {
      return;
    }
    const picker = document.createElement("div");
    picker.className = "column-picker-row";
    const boxes: HTMLInputElement[] = [];
    for (const column of state.table.schema.columns) {
      const label = document.createElement("label");
      label.className = "column-option";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = column.name;
      box.checked = state.selectedColumns.includes(column.name);
      box.addEventListener("change", () => {
        const picked = boxes.filter((b) => b.checked).map((b) => b.value);
        this.store.update({ selectedColumns: picked });
      });
      boxes.push(box);
      label.appendChild(box);
      label.appendChild(document.createTextNode(` ${column.name}`));
      picker.appendChild(label);
    }
    const go = document.createElement("button");
    go.type = "button";
    go.className = "group-values";
    go.textContent = "group values";
    go.addEventListener("click", () => {
      const columns = boxes.filter((b) => b.checked).map((b) => b.value);
      void this.groupValues(columns);
    });
    picker.appendChild(go);
    this.columnsHost.replaceChildren(picker);
  }
}
