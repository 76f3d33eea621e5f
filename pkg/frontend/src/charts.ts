/**
 * Chart builders: one echarts option per figure, fed by a validated table.
 */

import type { EChartsOption, SeriesOption } from "echarts";
import { numeric, Table } from "./csv";

const PALETTE = ["#4063d8", "#cb3c33", "#389826", "#9558b2", "#d68a00", "#17a2b8", "#6c4a1f"];

function base(title: string, xName: string, yName: string): EChartsOption {
  return {
    animation: false,
    backgroundColor: "#ffffff",
    color: PALETTE,
    title: { text: title, left: "center", textStyle: { fontSize: 14 } },
    legend: { bottom: 0, type: "scroll" },
    grid: { left: 60, right: 25, top: 45, bottom: 60 },
    xAxis: { type: "value", name: xName, nameLocation: "middle", nameGap: 28 },
    yAxis: { type: "value", name: yName, nameLocation: "middle", nameGap: 42 },
  };
}

function perNodeSeries(table: Table, name: string): SeriesOption[] {
  const nodes = [...new Set(table.rows.map((row) => row.node))];
  const series: SeriesOption[] = [];
  for (const node of nodes) {
    const rows = table.rows.filter((row) => row.node === node);
    series.push({
      name: `node ${node} learning`,
      type: "line",
      showSymbol: false,
      data: rows.map((row) => [numeric(row, "frame", name), numeric(row, "p_learning", name)]),
    });
    series.push({
      name: `node ${node} best response`,
      type: "line",
      showSymbol: false,
      lineStyle: { type: "dashed" },
      data: rows.map((row) => [numeric(row, "frame", name), numeric(row, "p_best_response", name)]),
    });
  }
  return series;
}

export function convergenceChart(table: Table): EChartsOption {
  const option = base("Transmission probability over frames", "frame", "probability");
  option.series = perNodeSeries(table, "convergence.csv");
  return option;
}

export function churnChart(table: Table): EChartsOption {
  const option = base("Learning through roster churn", "frame", "probability");
  const frames = [...new Set(table.rows.map((row) => row.frame))];
  const roster = frames.map((frame) => {
    const row = table.rows.find((r) => r.frame === frame)!;
    return [numeric(row, "frame", "churn.csv"), numeric(row, "roster_size", "churn.csv")];
  });
  option.yAxis = [
    (option.yAxis as object) as never,
    { type: "value", name: "roster size", nameLocation: "middle", nameGap: 30, minInterval: 1 },
  ] as never;
  option.series = [
    ...perNodeSeries(table, "churn.csv"),
    {
      name: "roster size",
      type: "line",
      step: "end",
      showSymbol: false,
      yAxisIndex: 1,
      lineStyle: { width: 1, color: "#888888" },
      itemStyle: { color: "#888888" },
      data: roster,
    },
  ];
  return option;
}

function sweepPair(table: Table, name: string, column: "p" | "age"): SeriesOption[] {
  return (["learning", "rr"] as const).map((scheme) => ({
    name: scheme === "rr" ? "round robin" : "learning",
    type: "line",
    symbol: "circle",
    data: table.rows.map((row) => [
      numeric(row, "n", name),
      numeric(row, `${column}_${scheme}`, name),
    ]),
  }));
}

export function probVsNChart(table: Table): EChartsOption {
  const option = base("Converged probability vs number of nodes", "nodes", "probability");
  option.series = sweepPair(table, "sweep_prob_vs_n.csv", "p");
  return option;
}

export function ageVsNChart(table: Table): EChartsOption {
  const option = base("Expected age vs number of nodes", "nodes", "age (slots)");
  option.yAxis = { type: "log", name: "age (slots)", nameLocation: "middle", nameGap: 42 };
  option.series = sweepPair(table, "sweep_age_vs_n.csv", "age");
  return option;
}

export function poaChart(table: Table): EChartsOption {
  const option = base("Price of anarchy vs number of nodes", "nodes", "price of anarchy");
  option.series = [
    {
      name: "price of anarchy",
      type: "line",
      symbol: "circle",
      data: table.rows.map((row) => [
        numeric(row, "n", "sweep_poa_vs_n.csv"),
        numeric(row, "poa", "sweep_poa_vs_n.csv"),
      ]),
    },
  ];
  return option;
}
