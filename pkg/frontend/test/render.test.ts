import { mkdtempSync, readdirSync, readFileSync, statSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { main } from "../src/cli";
import { FIGURES, renderAll } from "../src/render";

const FIXTURES = join(__dirname, "..", "fixtures", "results");

function snapshotDir(dir: string): Map<string, Buffer> {
  return new Map(readdirSync(dir).map((name) => [name, readFileSync(join(dir, name))]));
}

describe("renderAll", () => {
  it("regenerates all five figures from a completed harness run", () => {
    const out = mkdtempSync(join(tmpdir(), "aoilab-figs-"));
    const written = renderAll(FIXTURES, out);
    expect(written).toHaveLength(5);
    expect(written.map((p) => p.split("/").pop())).toEqual(FIGURES.map((f) => f.file));
    for (const path of written) {
      const svg = readFileSync(path, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(statSync(path).size).toBeGreaterThan(1000);
    }
  });

  it("never mutates the result tables", () => {
    const before = snapshotDir(FIXTURES);
    renderAll(FIXTURES, mkdtempSync(join(tmpdir(), "aoilab-figs-")));
    const after = snapshotDir(FIXTURES);
    expect([...after.keys()].sort()).toEqual([...before.keys()].sort());
    for (const [name, bytes] of before) {
      expect(after.get(name)!.equals(bytes)).toBe(true);
    }
  });

  it("is deterministic across renders up to chart-instance ids", () => {
    // echarts numbers style classes and clip paths per chart instance with a
    // process-global counter; everything else must be reproducible.
    const normalize = (svg: string) => svg.replace(/zr\d+-cls-\d+/g, "zrcls").replace(/zr\d+-/g, "zr-");
    const a = mkdtempSync(join(tmpdir(), "aoilab-figs-a-"));
    const b = mkdtempSync(join(tmpdir(), "aoilab-figs-b-"));
    renderAll(FIXTURES, a);
    renderAll(FIXTURES, b);
    for (const figure of FIGURES) {
      expect(normalize(readFileSync(join(a, figure.file), "utf8"))).toBe(
        normalize(readFileSync(join(b, figure.file), "utf8")),
      );
    }
  });

  it("fails on an empty results directory before writing anything", () => {
    const empty = mkdtempSync(join(tmpdir(), "aoilab-noresults-"));
    const out = mkdtempSync(join(tmpdir(), "aoilab-figs-"));
    expect(() => renderAll(empty, out)).toThrow(/missing table convergence.csv/);
    expect(readdirSync(out)).toHaveLength(0);
  });
});

describe("cli", () => {
  it("renders and exits zero", () => {
    const out = mkdtempSync(join(tmpdir(), "aoilab-cli-"));
    expect(main([FIXTURES, out])).toBe(0);
    expect(readdirSync(out)).toHaveLength(5);
  });

  it("exits nonzero on schema mismatch", () => {
    const empty = mkdtempSync(join(tmpdir(), "aoilab-cli-empty-"));
    expect(main([empty, mkdtempSync(join(tmpdir(), "aoilab-cli-out-"))])).toBe(1);
  });

  it("rejects wrong usage", () => {
    expect(main(["one-arg"])).toBe(2);
  });
});
