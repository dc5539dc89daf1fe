/** Shared fixtures: a small extraction result and a scripted fetch. */

import type {
  ContextsView,
  GroupingView,
  PlanPayload,
  TableView,
} from "../src/types.js";

export function fixtureTable(): TableView {
  return {
    query_id: "q1",
    collection_id: "lab",
    revision: 0,
    question: "What crops and nutrient values are reported?",
    summary: "three documents report carotenoid values",
    degraded_docs: [],
    schema: {
      columns: [
        { name: "crop", description: "crop under study", kind: "String" },
        { name: "value", description: "nutrient value", kind: "Float" },
        { name: "unit", description: "measurement unit", kind: "String" },
      ],
    },
    quality: {
      missingness: 2 / 9,
      column_inconsistency: { crop: 2 / 3, value: null, unit: 0 },
      record_scores: [],
      thresholds: { answer_relevancy: 0.5, context_relevancy: 0.5, faithfulness: 0.5 },
    },
    records: [
      {
        rid: 0,
        doc_id: "p1",
        ordinal: 0,
        cells: {
          crop: { text: "Orange Sweet Potato", empty: false },
          value: { text: "82.5", empty: false },
          unit: { text: "mg", empty: false },
        },
        flags: [],
        scores: { answer_relevancy: 0.9, context_relevancy: 1.0, faithfulness: 1.0 },
      },
      {
        rid: 1,
        doc_id: "p2",
        ordinal: 0,
        cells: {
          crop: { text: "orange sweet potatoes", empty: false },
          value: { text: "", empty: true },
          unit: { text: "mg", empty: false },
        },
        flags: ["empty_cells"],
        scores: { answer_relevancy: 0.8, context_relevancy: 0.5, faithfulness: 1.0 },
      },
      {
        rid: 2,
        doc_id: "p3",
        ordinal: 0,
        cells: {
          crop: { text: "OFSP", empty: false },
          value: { text: "77", empty: false },
          unit: { text: "", empty: true },
        },
        flags: ["empty_cells", "unverified_span"],
        scores: { answer_relevancy: 0.7, context_relevancy: 0.5, faithfulness: 0.5 },
      },
    ],
  };
}

export function fixturePlan(): PlanPayload {
  return {
    column: "crop",
    groups: {
      "sweet potatoes": ["Orange Sweet Potato", "orange sweet potatoes", "OFSP"],
      maize: ["maize"],
    },
    canonical: {
      "sweet potatoes": "Orange Sweet Potato",
      maize: "maize",
    },
  };
}

export function fixtureGrouping(): GroupingView {
  return {
    column: "crop",
    points: [
      {
        x: -1.2,
        y: 0.4,
        cluster_id: 0,
        frequency: 1,
        variant: "Orange Sweet Potato",
        record_indices: [0],
      },
      {
        x: -0.9,
        y: 0.1,
        cluster_id: 0,
        frequency: 1,
        variant: "orange sweet potatoes",
        record_indices: [1],
      },
      { x: -1.0, y: -0.2, cluster_id: 0, frequency: 1, variant: "OFSP", record_indices: [2] },
      { x: 1.6, y: -0.3, cluster_id: 1, frequency: 3, variant: "maize", record_indices: [3] },
    ],
    clusters: [
      {
        cluster_id: 0,
        label: "sweet potatoes",
        members: { "Orange Sweet Potato": 1, "orange sweet potatoes": 1, OFSP: 1 },
        frequency_tier: "medium",
      },
      {
        cluster_id: 1,
        label: "maize",
        members: { maize: 3 },
        frequency_tier: "medium",
      },
    ],
    k: 2,
  };
}

export function fixtureContexts(): ContextsView {
  const snippet =
    "Field trials of Orange Sweet Potato reported 82.5 mg per 100 g of beta-carotene.";
  return {
    rid: 0,
    doc_id: "p1",
    contexts: [
      {
        chunk_id: "p1:text:0",
        kind: "text",
        raw_content: snippet,
        summary: "trial results for one crop",
      },
      {
        chunk_id: "p1:table:0",
        kind: "table",
        raw_content: "crop,value\nOrange Sweet Potato,82.5",
        summary: "result table",
      },
    ],
    spans: {
      crop: [
        {
          chunk_id: "p1:text:0",
          char_start: snippet.indexOf("Orange"),
          char_end: snippet.indexOf("Orange") + "Orange Sweet Potato".length,
          matched_text: "Orange Sweet Potato",
        },
      ],
      value: [
        {
          chunk_id: "p1:text:0",
          char_start: snippet.indexOf("82.5"),
          char_end: snippet.indexOf("82.5") + 4,
          matched_text: "82.5",
        },
      ],
      unit: [],
    },
    flags: [],
  };
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface ScriptedResponse {
  status?: number;
  body: unknown;
}

export type Responder = (
  method: string,
  path: string,
  body: unknown,
) => ScriptedResponse | undefined;

/** A fetch stand-in that scripts responses and records every call. */
export function recordingFetch(responder: Responder): {
  fetchImpl: typeof fetch;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === "string" ? input : input.toString();
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path: url, body });
    const scripted = responder(method, url, body);
    if (scripted === undefined) {
      return new Response(JSON.stringify({ detail: `no route for ${method} ${url}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(JSON.stringify(scripted.body), {
      status: scripted.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { fetchImpl, calls };
}

/** Deterministic PRNG for property-style loops. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
