import { describe, expect, it } from "vitest";

import {
  clonePlan,
  createGroup,
  initialState,
  moveVariant,
  normalizeValue,
  parseAttributeForm,
  removeGroup,
  renameGroup,
  setCanonical,
  Store,
  validatePlan,
} from "../src/state.js";
import type { PlanPayload } from "../src/types.js";
import { fixturePlan, mulberry32 } from "./fixtures.js";

describe("store", () => {
  it("notifies subscribers and merges patches", () => {
    const store = new Store();
    const seen: (string | null)[] = [];
    store.subscribe((state) => seen.push(state.collectionId));
    store.update({ collectionId: "lab" });
    store.update({ revision: 4 });
    expect(seen).toEqual(["lab", "lab"]);
    expect(store.get().collectionId).toBe("lab");
    expect(store.get().revision).toBe(4);
  });

  it("stops notifying after unsubscribe", () => {
    const store = new Store();
    let count = 0;
    const unsubscribe = store.subscribe(() => count++);
    store.update({ revision: 1 });
    unsubscribe();
    store.update({ revision: 2 });
    expect(count).toBe(1);
  });

  it("starts with no selection and no draft", () => {
    const state = initialState();
    expect(state.draftPlan).toBeNull();
    expect(state.selectedRids).toBeNull();
    expect(state.revision).toBe(0);
  });
});

describe("attribute form parsing", () => {
  it("splits name and description on the first colon", () => {
    const parsed = parseAttributeForm(
      "crop: the crop under study\nvalue: nutrient value: mg per 100 g\n\nunit\n",
    );
    expect(parsed).toEqual({
      crop: "the crop under study",
      value: "nutrient value: mg per 100 g",
      unit: "",
    });
  });

  it("returns an empty mapping for blank input", () => {
    expect(parseAttributeForm("   \n  \n")).toEqual({});
  });
});

describe("draft plan edits", () => {
  it("clones deeply so draft edits stay local", () => {
    const plan = fixturePlan();
    const copy = clonePlan(plan);
    copy.groups["maize"].push("corn");
    copy.canonical["maize"] = "corn";
    expect(plan.groups["maize"]).toEqual(["maize"]);
    expect(plan.canonical["maize"]).toBe("maize");
  });

  it("moves a variant between groups without touching the input", () => {
    const plan = fixturePlan();
    const next = moveVariant(plan, "OFSP", "sweet potatoes", "maize");
    expect(next.groups["sweet potatoes"]).toEqual([
      "Orange Sweet Potato",
      "orange sweet potatoes",
    ]);
    expect(next.groups["maize"]).toEqual(["maize", "OFSP"]);
    expect(plan.groups["sweet potatoes"]).toContain("OFSP");
  });

  it("reseats the canonical when the canonical variant moves out", () => {
    const plan = fixturePlan();
    const next = moveVariant(plan, "Orange Sweet Potato", "sweet potatoes", "maize");
    expect(next.canonical["sweet potatoes"]).toBe("orange sweet potatoes");
  });

  it("blanks the canonical when the last variant moves out", () => {
    const plan: PlanPayload = {
      column: "crop",
      groups: { a: ["x"], b: [] },
      canonical: { a: "x", b: "" },
    };
    const next = moveVariant(plan, "x", "a", "b");
    expect(next.groups["a"]).toEqual([]);
    expect(next.canonical["a"]).toBe("");
  });

  it("treats a same-group move as a no-op", () => {
    const plan = fixturePlan();
    const next = moveVariant(plan, "OFSP", "sweet potatoes", "sweet potatoes");
    expect(next).toEqual(plan);
  });

  it("rejects moves involving unknown groups or absent variants", () => {
    const plan = fixturePlan();
    expect(() => moveVariant(plan, "OFSP", "sweet potatoes", "rice")).toThrow(/unknown group/);
    expect(() => moveVariant(plan, "corn", "maize", "sweet potatoes")).toThrow(/not in group/);
  });

  it("renames a group and carries membership and canonical over", () => {
    const plan = fixturePlan();
    const next = renameGroup(plan, "sweet potatoes", "OFSP group");
    expect(Object.keys(next.groups)).toEqual(["OFSP group", "maize"]);
    expect(next.groups["OFSP group"]).toHaveLength(3);
    expect(next.canonical["OFSP group"]).toBe("Orange Sweet Potato");
    expect("sweet potatoes" in next.canonical).toBe(false);
  });

  it("rejects blank and colliding group names", () => {
    const plan = fixturePlan();
    expect(() => renameGroup(plan, "maize", "   ")).toThrow(/blank/);
    expect(() => renameGroup(plan, "maize", "sweet potatoes")).toThrow(/already exists/);
    expect(() => createGroup(plan, "maize")).toThrow(/already exists/);
  });

  it("creates empty groups and removes them again", () => {
    const plan = fixturePlan();
    const withGroup = createGroup(plan, "cassava");
    expect(withGroup.groups["cassava"]).toEqual([]);
    expect(withGroup.canonical["cassava"]).toBe("");
    const removed = removeGroup(withGroup, "cassava");
    expect("cassava" in removed.groups).toBe(false);
  });

  it("refuses to remove a group that still has variants", () => {
    expect(() => removeGroup(fixturePlan(), "maize")).toThrow(/still has/);
  });

  it("sets a free-text canonical value", () => {
    const plan = fixturePlan();
    const next = setCanonical(plan, "sweet potatoes", "OFSP");
    expect(next.canonical["sweet potatoes"]).toBe("OFSP");
    expect(plan.canonical["sweet potatoes"]).toBe("Orange Sweet Potato");
  });
});

describe("plan validation", () => {
  it("accepts the fixture plan", () => {
    expect(validatePlan(fixturePlan())).toEqual([]);
  });

  it("flags a missing target column", () => {
    const plan = fixturePlan();
    plan.column = "";
    expect(validatePlan(plan)[0]).toContain("no target column");
  });

  it("flags one variant appearing in two groups, case-insensitively", () => {
    const plan: PlanPayload = {
      column: "crop",
      groups: { a: ["OFSP"], b: ["ofsp  "] },
      canonical: { a: "OFSP", b: "" },
    };
    const errors = validatePlan(plan);
    expect(errors).toHaveLength(1);
    expect(errors[0]).toMatch(/appears in both/);
  });

  it("flags a canonical that is a variant of a different group", () => {
    const plan: PlanPayload = {
      column: "crop",
      groups: { a: ["sweet potato"], b: ["maize"] },
      canonical: { a: "maize", b: "maize" },
    };
    const errors = validatePlan(plan);
    expect(errors).toHaveLength(1);
    expect(errors[0]).toMatch(/canonical "maize" of group "a"/);
  });

  it("allows a canonical that is not a variant anywhere", () => {
    const plan: PlanPayload = {
      column: "crop",
      groups: { a: ["Orange Sweet Potato", "orange sweet potatoes"] },
      canonical: { a: "OFSP" },
    };
    expect(validatePlan(plan)).toEqual([]);
  });

  it("ignores blank canonicals", () => {
    const plan: PlanPayload = {
      column: "crop",
      groups: { a: ["x"], b: ["y"] },
      canonical: { a: "", b: "   " },
    };
    expect(validatePlan(plan)).toEqual([]);
  });

  it("matches the service's trim-and-lowercase comparison", () => {
    expect(normalizeValue("  Orange Sweet POTATO \n")).toBe("orange sweet potato");
  });
});

describe("draft edit sequences", () => {
  it("keeps a valid plan valid under random move sequences", () => {
    const random = mulberry32(1234);
    for (let trial = 0; trial < 50; trial++) {
      let plan: PlanPayload = {
        column: "crop",
        groups: {
          g0: ["a", "b", "c"],
          g1: ["d", "e"],
          g2: ["f"],
          g3: [],
        },
        canonical: { g0: "a", g1: "d", g2: "f", g3: "" },
      };
      const names = Object.keys(plan.groups);
      for (let step = 0; step < 12; step++) {
        const from = names[Math.floor(random() * names.length)];
        const to = names[Math.floor(random() * names.length)];
        const members = plan.groups[from];
        if (members.length === 0 || from === to) {
          continue;
        }
        const variant = members[Math.floor(random() * members.length)];
        plan = moveVariant(plan, variant, from, to);
        expect(validatePlan(plan)).toEqual([]);
      }
      const allVariants = Object.values(plan.groups).flat().sort();
      expect(allVariants).toEqual(["a", "b", "c", "d", "e", "f"]);
    }
  });
});
