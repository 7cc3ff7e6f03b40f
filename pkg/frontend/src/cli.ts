/**
 * render --figure fig2 --inputs a.csv,b.csv --out fig2.svg
 */

import { writeFileSync } from "node:fs";

import { buildFigure, FigureId, FigureSpec } from "./figures.js";
import { SchemaError } from "./csv.js";

function parseArgs(argv: string[]): FigureSpec {
  if (argv[0] !== "render") {
    throw new Error("usage: render --figure fig2|fig3|fig4 --inputs a.csv,b.csv --out out.svg");
  }
  let figure: string | undefined;
  let inputs: string[] = [];
  let output: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${key}`);
    }
    if (key === "--figure") figure = value;
    else if (key === "--inputs") inputs = value.split(",").filter((s) => s.length > 0);
    else if (key === "--out") output = value;
    else throw new Error(`unknown option ${key}`);
  }
  if (figure !== "fig2" && figure !== "fig3" && figure !== "fig4") {
    throw new Error("--figure must be fig2, fig3 or fig4");
  }
  if (inputs.length === 0 || output === undefined) {
    throw new Error("--inputs and --out are required");
  }
  return { figure: figure as FigureId, inputs, output };
}

export function main(argv: string[]): number {
  let spec: FigureSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const svg = buildFigure(spec);
    writeFileSync(spec.output, svg);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

if (process.argv[1] !== undefined && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
