/** Typed fetch client for the papertab service. All state changes go through here. */

import type {
  AddBundlesResponse,
  ApplyPlanResponse,
  ClearFlagsResponse,
  CollectionsResponse,
  ContextsView,
  CreateCollectionResponse,
  EditCellResponse,
  GroupsResponse,
  JobView,
  MergeResponse,
  PlanPayload,
  SubmitQueryResponse,
  TableView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
    readonly degraded: boolean = false,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface QueryRequest {
  question?: string;
  attributes?: Record<string, string>;
  k?: number;
}

export interface CellEdit {
  revision: number;
  doc_id: string;
  ordinal: number;
  column: string;
  value: string | null;
}

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
}

const DEFAULT_POLL_INTERVAL_MS = 400;
const DEFAULT_POLL_TIMEOUT_MS = 120_000;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      let degraded = false;
      try {
        const payload = (await response.json()) as { detail?: string; degraded?: boolean };
        if (typeof payload.detail === "string") {
          detail = payload.detail;
        }
        degraded = payload.degraded === true;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, detail, degraded);
    }
    return (await response.json()) as T;
  }

  createCollection(collectionId?: string): Promise<CreateCollectionResponse> {
    return this.request("POST", "/collections", {
      collection_id: collectionId ?? null,
    });
  }

  listCollections(): Promise<CollectionsResponse> {
    return this.request("GET", "/collections");
  }

  addBundles(collectionId: string, bundles: unknown[]): Promise<AddBundlesResponse> {
    return this.request("POST", `/collections/${encodeURIComponent(collectionId)}/bundles`, {
      bundles,
    });
  }

  submitQuery(collectionId: string, query: QueryRequest): Promise<SubmitQueryResponse> {
    return this.request("POST", `/collections/${encodeURIComponent(collectionId)}/queries`, query);
  }

  jobStatus(jobId: string): Promise<JobView> {
    return this.request("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  /** Poll a job until it leaves the queue; resolves on "done", rejects on "error". */
  async waitForJob(jobId: string, options: PollOptions = {}): Promise<JobView> {
    const interval = options.intervalMs ?? DEFAULT_POLL_INTERVAL_MS;
    const deadline = Date.now() + (options.timeoutMs ?? DEFAULT_POLL_TIMEOUT_MS);
    for (;;) {
      const job = await this.jobStatus(jobId);
      if (job.status === "done") {
        return job;
      }
      if (job.status === "error") {
        throw new ApiError(500, job.error ?? `job ${jobId} failed`);
      }
      if (Date.now() >= deadline) {
        throw new ApiError(408, `job ${jobId} still ${job.status} after timeout`);
      }
      await sleep(interval);
    }
  }

  table(queryId: string): Promise<TableView> {
    return this.request("GET", `/queries/${encodeURIComponent(queryId)}/table`);
  }

  editCell(queryId: string, edit: CellEdit): Promise<EditCellResponse> {
    return this.request("POST", `/queries/${encodeURIComponent(queryId)}/table/cells`, edit);
  }

  clearFlags(
    queryId: string,
    revision: number,
    docId: string,
    ordinal: number,
    flags?: string[],
  ): Promise<ClearFlagsResponse> {
    return this.request("POST", `/queries/${encodeURIComponent(queryId)}/flags:clear`, {
      revision,
      doc_id: docId,
      ordinal,
      flags: flags ?? null,
    });
  }

  contexts(queryId: string, rid: number): Promise<ContextsView> {
    return this.request(
      "GET",
      `/queries/${encodeURIComponent(queryId)}/records/${rid}/contexts`,
    );
  }

  groups(queryId: string, columns: string[], seed?: number): Promise<GroupsResponse> {
    return this.request("POST", `/queries/${encodeURIComponent(queryId)}/groups`, {
      columns,
      seed: seed ?? null,
    });
  }

  applyPlan(queryId: string, revision: number, plan: PlanPayload): Promise<ApplyPlanResponse> {
    return this.request("POST", `/queries/${encodeURIComponent(queryId)}/plan:apply`, {
      revision,
      plan,
    });
  }

  mergeDb(
    collectionId: string,
    queryId: string,
    policy: string = "incoming_wins",
  ): Promise<MergeResponse> {
    return this.request("POST", `/collections/${encodeURIComponent(collectionId)}/db:merge`, {
      query_id: queryId,
      policy,
    });
  }

  dbCsvUrl(collectionId: string): string {
    return `${this.baseUrl}/collections/${encodeURIComponent(collectionId)}/db.csv`;
  }

  async dbCsv(collectionId: string): Promise<string> {
    const response = await this.fetchImpl(this.dbCsvUrl(collectionId), { method: "GET" });
    if (!response.ok) {
      throw new ApiError(response.status, `${response.status} ${response.statusText}`);
    }
    return response.text();
  }
}
