/**
 * Figure assembly: panel grids over the trajectory/sweep CSV columns.
 *
 * fig2 - internal state vs t/T: average energy, level populations, linear
 *        entropy, geometric phase (rows) for each input run (columns).
 * fig3 - kinematics vs t/T: displacement, velocity, uncertainty product,
 *        lateral force, dissipated heat.
 * fig4 - first-period summary vs drive velocity (log axis): released power,
 *        slip time, maximal lateral force, split into quantum/classical.
 */

import { readFileSync } from "node:fs";
import { basename } from "node:path";

import {
  numericColumn,
  parseCsv,
  requireColumns,
  SchemaError,
  stringColumn,
  SWEEP_COLUMNS,
  Table,
  TRAJECTORY_COLUMNS,
} from "./csv.js";
import { PanelSpec, renderFigure, Series } from "./svg.js";

export type FigureId = "fig2" | "fig3" | "fig4";

export interface FigureSpec {
  figure: FigureId;
  inputs: string[]; // CSV paths; labels default to the file stems
  output: string;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

interface LabelledTable {
  label: string;
  table: Table;
}

function loadInputs(paths: string[], required: readonly string[]): LabelledTable[] {
  if (paths.length === 0) {
    throw new SchemaError("no input files given");
  }
  return paths.map((path) => {
    const table = parseCsv(readFileSync(path, "utf-8"));
    requireColumns(table, required);
    return { label: basename(path).replace(/\.csv$/, ""), table };
  });
}

function fig2Panels(inputs: LabelledTable[]): PanelSpec[] {
  const rows: Array<{ columns: string[]; yLabel: string; title: string }> = [
    { columns: ["E_avg"], yLabel: "E / (hbar Omega)", title: "average energy" },
    { columns: ["P0", "P1", "P2", "P3", "P4"], yLabel: "P_n", title: "populations" },
    { columns: ["S_L"], yLabel: "S_L", title: "linear entropy" },
    { columns: ["gamma_phase"], yLabel: "gamma (rad)", title: "geometric phase" },
  ];
  const panels: PanelSpec[] = [];
  for (const row of rows) {
    for (const { label, table } of inputs) {
      const t = numericColumn(table, "t_over_T");
      const series: Series[] = row.columns.map((col, i) => ({
        x: t,
        y: numericColumn(table, col),
        color: PALETTE[i % PALETTE.length],
        label: col,
      }));
      panels.push({
        title: `${row.title} - ${label}`,
        xLabel: "t / T",
        yLabel: row.yLabel,
        series,
      });
    }
  }
  return panels;
}

function fig3Panels(inputs: LabelledTable[]): PanelSpec[] {
  const panels: PanelSpec[] = [];
  const rows: Array<{ cols: Array<{ name: string; dashed?: boolean }>; yLabel: string; title: string }> = [
    {
      cols: [{ name: "x_avg" }, { name: "x_c", dashed: true }],
      yLabel: "x / ell",
      title: "displacement",
    },
    { cols: [{ name: "v_avg" }], yLabel: "v / nu", title: "velocity" },
    { cols: [{ name: "sx_sp" }], yLabel: "sigma_x sigma_p / hbar", title: "uncertainty" },
    { cols: [{ name: "F_L_norm" }], yLabel: "F_L / (pi U0 / a)", title: "lateral force" },
    { cols: [{ name: "Q" }], yLabel: "-Q / (hbar Omega)", title: "dissipated heat" },
  ];
  for (const row of rows) {
    for (const { label, table } of inputs) {
      const t = numericColumn(table, "t_over_T");
      const series: Series[] = row.cols.map((c, i) => ({
        x: t,
        y:
          c.name === "Q"
            ? numericColumn(table, c.name).map((v) => -v)
            : numericColumn(table, c.name),
        color: PALETTE[i % PALETTE.length],
        label: c.name,
        dashed: c.dashed,
      }));
      panels.push({
        title: `${row.title} - ${label}`,
        xLabel: "t / T",
        yLabel: row.yLabel,
        series,
      });
    }
  }
  return panels;
}

function fig4Panels(inputs: LabelledTable[]): PanelSpec[] {
  const quantities: Array<{ col: string; yLabel: string; title: string; negate?: boolean }> = [
    { col: "P_released_end", yLabel: "-P / (hbar Omega^2)", title: "released power" },
    { col: "t_slip_over_T", yLabel: "t_slip / T", title: "slip time" },
    { col: "F_L_max_norm", yLabel: "F_max / (pi U0 / a)", title: "maximal lateral force" },
  ];
  const panels: PanelSpec[] = [];
  for (const q of quantities) {
    const series: Series[] = [];
    let k = 0;
    for (const { label, table } of inputs) {
      const v = numericColumn(table, "v_over_nu");
      const y = numericColumn(table, q.col);
      const modes = stringColumn(table, "mode");
      for (const mode of Array.from(new Set(modes)).sort()) {
        const xs: number[] = [];
        const ys: number[] = [];
        modes.forEach((m, i) => {
          if (m === mode) {
            xs.push(v[i]);
            ys.push(y[i]);
          }
        });
        series.push({
          x: xs,
          y: ys,
          color: PALETTE[k++ % PALETTE.length],
          label: `${label}:${mode}`,
        });
      }
    }
    panels.push({ title: q.title, xLabel: "v / nu", yLabel: q.yLabel, series, logX: true });
  }
  return panels;
}

export function buildFigure(spec: FigureSpec): string {
  if (spec.figure === "fig4") {
    const inputs = loadInputs(spec.inputs, SWEEP_COLUMNS);
    return renderFigure(fig4Panels(inputs), 3, 360, 260);
  }
  const inputs = loadInputs(spec.inputs, TRAJECTORY_COLUMNS);
  if (spec.figure === "fig2") {
    return renderFigure(fig2Panels(inputs), inputs.length);
  }
  if (spec.figure === "fig3") {
    return renderFigure(fig3Panels(inputs), inputs.length);
  }
  throw new SchemaError(`unknown figure ${spec.figure}`);
}
