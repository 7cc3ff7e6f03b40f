/**
 * CSV reading with strict schema checks for the simulator's output files.
 *
 * Trajectory files carry the 18-column header written by the CLI; sweep
 * summaries carry 5 columns. Blank cells mark quantities a mode does not
 * produce (classical rows leave the quantum-only columns empty).
 */

export const TRAJECTORY_COLUMNS = [
  "t_bar",
  "t_over_T",
  "E_avg",
  "P0",
  "P1",
  "P2",
  "P3",
  "P4",
  "S_L",
  "x_avg",
  "x_c",
  "v_avg",
  "sx_sp",
  "F_L_norm",
  "W",
  "Q",
  "P_released",
  "gamma_phase",
] as const;

export const SWEEP_COLUMNS = [
  "v_over_nu",
  "mode",
  "P_released_end",
  "t_slip_over_T",
  "F_L_max_norm",
] as const;

export class SchemaError extends Error {}

export interface Table {
  /** column name -> per-row raw strings */
  columns: Map<string, string[]>;
  nRows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty file: no header");
  }
  const header = lines[0].split(",");
  const columns = new Map<string, string[]>(header.map((h) => [h, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`row ${i + 1}: expected ${header.length} cells, got ${cells.length}`);
    }
    header.forEach((h, j) => columns.get(h)!.push(cells[j]));
  }
  return { columns, nRows: lines.length - 1 };
}

export function requireColumns(table: Table, names: readonly string[]): void {
  for (const name of names) {
    if (!table.columns.has(name)) {
      throw new SchemaError(`missing column ${name}`);
    }
  }
  if (table.nRows === 0) {
    throw new SchemaError("no rows");
  }
}

/** Numeric column; blank cells become NaN (skipped when plotting). */
export function numericColumn(table: Table, name: string): number[] {
  const raw = table.columns.get(name);
  if (raw === undefined) {
    throw new SchemaError(`missing column ${name}`);
  }
  return raw.map((cell) => (cell === "" ? NaN : Number(cell)));
}

export function stringColumn(table: Table, name: string): string[] {
  const raw = table.columns.get(name);
  if (raw === undefined) {
    throw new SchemaError(`missing column ${name}`);
  }
  return raw;
}
