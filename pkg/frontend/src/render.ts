/**
 * Renders the five standard figures from a completed harness run.
 * Reading is strictly read-only; figures are written as standalone SVG.
 */

import * as echarts from "echarts";
import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";
import type { EChartsOption } from "echarts";
import {
  ageVsNChart,
  churnChart,
  convergenceChart,
  poaChart,
  probVsNChart,
} from "./charts";
import { Table } from "./csv";
import { loadTable } from "./schema";

export interface Figure {
  table: string;
  file: string;
  build: (table: Table) => EChartsOption;
}

export const FIGURES: Figure[] = [
  { table: "convergence", file: "fig_convergence.svg", build: convergenceChart },
  { table: "churn", file: "fig_churn.svg", build: churnChart },
  { table: "sweep_prob_vs_n", file: "fig_prob_vs_n.svg", build: probVsNChart },
  { table: "sweep_age_vs_n", file: "fig_age_vs_n.svg", build: ageVsNChart },
  { table: "sweep_poa_vs_n", file: "fig_poa_vs_n.svg", build: poaChart },
];

export function renderFigure(option: EChartsOption, width = 860, height = 520): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

/** Render every figure; returns the written paths in figure order. */
export function renderAll(resultsDir: string, figuresDir: string): string[] {
  const tables = new Map<string, Table>();
  for (const figure of FIGURES) {
    tables.set(figure.table, loadTable(resultsDir, figure.table));
  }
  mkdirSync(figuresDir, { recursive: true });
  const written: string[] = [];
  for (const figure of FIGURES) {
    const svg = renderFigure(figure.build(tables.get(figure.table)!));
    const path = join(figuresDir, figure.file);
    writeFileSync(path, svg);
    written.push(path);
  }
  return written;
}
