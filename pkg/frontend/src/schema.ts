/**
 * Expected table schemas, coupled to the harness only by these header names.
 */

import { existsSync, readFileSync } from "fs";
import { join } from "path";
import { parseCsv, Table } from "./csv";

const SWEEP_HEADER = [
  "n",
  "p_learning",
  "p_learning_se",
  "p_rr",
  "p_rr_se",
  "age_learning",
  "age_learning_se",
  "age_rr",
  "age_rr_se",
  "poa",
];

export const TABLE_SCHEMAS: Record<string, string[]> = {
  convergence: ["frame", "node", "p_learning", "p_best_response"],
  churn: ["frame", "node", "p_learning", "p_best_response", "roster_size"],
  sweep_prob_vs_n: SWEEP_HEADER,
  sweep_age_vs_n: SWEEP_HEADER,
  sweep_poa_vs_n: SWEEP_HEADER,
};

export const EXPECTED_FILES = Object.keys(TABLE_SCHEMAS).map((name) => `${name}.csv`);

/** Read one table and reject header drift with the columns named. */
export function loadTable(resultsDir: string, name: string): Table {
  const schema = TABLE_SCHEMAS[name];
  if (!schema) {
    throw new Error(`unknown table ${name}; known: ${Object.keys(TABLE_SCHEMAS).join(", ")}`);
  }
  const path = join(resultsDir, `${name}.csv`);
  if (!existsSync(path)) {
    throw new Error(
      `missing table ${name}.csv in ${resultsDir}; a completed harness run provides: ${EXPECTED_FILES.join(", ")}`,
    );
  }
  const table = parseCsv(readFileSync(path, "utf8"), `${name}.csv`);
  const missing = schema.filter((column) => !table.header.includes(column));
  const unexpected = table.header.filter((column) => !schema.includes(column));
  if (missing.length > 0 || unexpected.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push(`missing columns: ${missing.join(", ")}`);
    if (unexpected.length > 0) parts.push(`unexpected columns: ${unexpected.join(", ")}`);
    throw new Error(`${name}.csv does not match the documented schema (${parts.join("; ")})`);
  }
  if (table.rows.length === 0) {
    throw new Error(`${name}.csv has a header but no data rows`);
  }
  return table;
}
