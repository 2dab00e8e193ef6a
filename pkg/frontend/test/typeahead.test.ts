import { describe, expect, it } from "vitest";

import { isExactOption, rankMatches, Typeahead } from "../src/typeahead";

const OPTIONS = ["billing", "balance", "cancel", "roaming", "sim-swap", "top-up"];

describe("rankMatches", () => {
  it("returns leading options for an empty query", () => {
    expect(rankMatches(OPTIONS, "", 3)).toEqual(["billing", "balance", "cancel"]);
  });

  it("puts prefix matches before substring matches", () => {
    expect(rankMatches(OPTIONS, "b")).toEqual(["billing", "balance"]);
    expect(rankMatches(OPTIONS, "an")).toEqual(["balance", "cancel"]);
  });

  it("is case-insensitive", () => {
    expect(rankMatches(OPTIONS, "BIL")).toEqual(["billing"]);
  });

  it("never returns a string outside the option list", () => {
    for (const q of ["", "b", "an", "zzz", "SIM", "-"]) {
      for (const hit of rankMatches(OPTIONS, q)) {
        expect(OPTIONS).toContain(hit);
      }
    }
  });

  it("respects the limit", () => {
    expect(rankMatches(OPTIONS, "", 2)).toHaveLength(2);
  });
});

describe("Typeahead", () => {
  function make() {
    const seen: string[][] = [];
    const committed: string[] = [];
    const picker = new Typeahead({
      onSuggestions: (items) => seen.push(items),
      onCommit: (value) => committed.push(value),
    });
    picker.setOptions(OPTIONS);
    return { picker, seen, committed };
  }

  it("commits only real options via the highlight", () => {
    const { picker, committed } = make();
    picker.input("bal");
    expect(picker.commitHighlighted()).toBe(true);
    expect(picker.value).toBe("balance");
    expect(committed).toEqual(["balance"]);
  });

  it("typing an exact option sets the value without enter", () => {
    const { picker } = make();
    picker.input("cancel");
    expect(picker.value).toBe("cancel");
  });

  it("a partial query has no committed value", () => {
    const { picker } = make();
    picker.input("canc");
    expect(picker.value).toBeNull();
  });

  it("arrow keys wrap around the suggestion list", () => {
    const { picker } = make();
    picker.input("b");
    expect(picker.highlightedValue).toBe("billing");
    picker.moveHighlight(1);
    expect(picker.highlightedValue).toBe("balance");
    picker.moveHighlight(1);
    expect(picker.highlightedValue).toBe("billing");
  });

  it("replacing the catalog drops a value that no longer exists", () => {
    const { picker } = make();
    picker.input("cancel");
    picker.setOptions(["billing"]);
    expect(picker.value).toBeNull();
  });

  it("commit with no suggestions is a no-op", () => {
    const { picker } = make();
    picker.input("zzz");
    expect(picker.commitHighlighted()).toBe(false);
    expect(picker.value).toBeNull();
  });
});

describe("isExactOption", () => {
  it("requires exact string membership", () => {
    expect(isExactOption(OPTIONS, "billing")).toBe(true);
    expect(isExactOption(OPTIONS, "Billing")).toBe(false);
    expect(isExactOption(OPTIONS, "")).toBe(false);
  });
});
