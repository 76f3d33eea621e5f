/**
 * Minimal CSV reader for the harness tables: a header row plus plain
 * numeric/integer cells, no quoting or embedded separators.
 */

export interface Table {
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, name: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${name}: file is empty`);
  }
  const header = lines[0].split(",");
  const rows: Record<string, string>[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${name}: row ${i + 1} has ${cells.length} cells but the header names ${header.length} columns`,
      );
    }
    const row: Record<string, string> = {};
    header.forEach((column, j) => {
      row[column] = cells[j];
    });
    rows.push(row);
  }
  return { header, rows };
}

export function numeric(row: Record<string, string>, column: string, name: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new Error(`${name}: column ${column} holds non-numeric value ${JSON.stringify(row[column])}`);
  }
  return value;
}
