import { describe, expect, it } from "vitest";
import { numeric, parseCsv } from "../src/csv";

describe("parseCsv", () => {
  it("reads header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n", "t.csv");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      { a: "1", b: "2" },
      { a: "3", b: "4" },
    ]);
  });

  it("rejects ragged rows with the row number", () => {
    expect(() => parseCsv("a,b\n1\n", "t.csv")).toThrow(/row 2 has 1 cells/);
  });

  it("rejects empty files", () => {
    expect(() => parseCsv("", "t.csv")).toThrow(/empty/);
  });
});

describe("numeric", () => {
  it("parses numbers and names bad cells", () => {
    expect(numeric({ x: "2.5" }, "x", "t.csv")).toBe(2.5);
    expect(() => numeric({ x: "wat" }, "x", "t.csv")).toThrow(/column x holds non-numeric/);
  });
});
