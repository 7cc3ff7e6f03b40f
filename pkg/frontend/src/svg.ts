/**
 * Minimal deterministic SVG plotting: fixed fonts, fixed precision, no
 * timestamps or randomness, so identical inputs give byte-identical output.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  dashed?: boolean;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
}

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toPrecision(8);
  return s.includes(".") || s.includes("e") ? s.replace(/\.?0+($|e)/, "$1") : s;
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = (span / n) / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

export function renderPanel(
  spec: PanelSpec,
  x0: number,
  y0: number,
  width: number,
  height: number
): string {
  const padL = 58;
  const padB = 40;
  const padT = 24;
  const padR = 12;
  const plotW = width - padL - padR;
  const plotH = height - padT - padB;
  const finite = (vals: number[]) => vals.filter((v) => Number.isFinite(v));
  const allX = finite(spec.series.flatMap((s) => s.x));
  const allY = finite(spec.series.flatMap((s) => s.y));
  let xLo = Math.min(...allX);
  let xHi = Math.max(...allX);
  let yLo = Math.min(...allY);
  let yHi = Math.max(...allY);
  if (!(xHi > xLo)) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  // constant-to-numerical-noise data plots as a flat centered line instead of
  // autoscaled roundoff wiggle
  if (yHi - yLo < 1e-6 * Math.max(1, Math.abs(yLo), Math.abs(yHi))) {
    const center = 0.5 * (yLo + yHi);
    yLo = center - 0.5;
    yHi = center + 0.5;
  }
  const ySpan = yHi - yLo;
  yLo -= 0.05 * ySpan;
  yHi += 0.05 * ySpan;

  const sx = (v: number) =>
    x0 +
    padL +
    (spec.logX
      ? ((Math.log10(v) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))) * plotW
      : ((v - xLo) / (xHi - xLo)) * plotW);
  const sy = (v: number) => y0 + padT + (1 - (v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(x0 + padL)}" y="${fmt(y0 + padT)}" width="${fmt(plotW)}" height="${fmt(
      plotH
    )}" fill="none" stroke="black" stroke-width="1"/>`
  );
  const xTicks = spec.logX ? logTicks(xLo, xHi) : niceTicks(xLo, xHi);
  for (const t of xTicks) {
    if (t < xLo - 1e-12 || t > xHi * (1 + 1e-12)) continue;
    const px = sx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(y0 + padT + plotH)}" x2="${fmt(px)}" y2="${fmt(
        y0 + padT + plotH + 5
      )}" stroke="black" stroke-width="1"/>`
    );
    const label = spec.logX ? `1e${Math.round(Math.log10(t))}` : fmt(Number(t.toPrecision(6)));
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(y0 + padT + plotH + 17)}" ${FONT} font-size="10" text-anchor="middle">${label}</text>`
    );
  }
  for (const t of niceTicks(yLo, yHi)) {
    const py = sy(t);
    parts.push(
      `<line x1="${fmt(x0 + padL - 5)}" y1="${fmt(py)}" x2="${fmt(x0 + padL)}" y2="${fmt(
        py
      )}" stroke="black" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${fmt(x0 + padL - 8)}" y="${fmt(py + 3)}" ${FONT} font-size="10" text-anchor="end">${fmt(
        Number(t.toPrecision(6))
      )}</text>`
    );
  }
  parts.push(
    `<text x="${fmt(x0 + padL + plotW / 2)}" y="${fmt(y0 + 14)}" ${FONT} font-size="12" text-anchor="middle">${spec.title}</text>`
  );
  parts.push(
    `<text x="${fmt(x0 + padL + plotW / 2)}" y="${fmt(y0 + height - 6)}" ${FONT} font-size="11" text-anchor="middle">${spec.xLabel}</text>`
  );
  parts.push(
    `<text x="${fmt(x0 + 14)}" y="${fmt(y0 + padT + plotH / 2)}" ${FONT} font-size="11" text-anchor="middle" transform="rotate(-90 ${fmt(
      x0 + 14
    )} ${fmt(y0 + padT + plotH / 2)})">${spec.yLabel}</text>`
  );
  for (const series of spec.series) {
    const points: string[] = [];
    for (let i = 0; i < series.x.length; i++) {
      if (Number.isFinite(series.x[i]) && Number.isFinite(series.y[i])) {
        points.push(`${fmt(sx(series.x[i]))},${fmt(sy(series.y[i]))}`);
      }
    }
    if (points.length === 0) continue;
    const dash = series.dashed ? " stroke-dasharray=\"5,3\"" : "";
    parts.push(
      `<polyline points="${points.join(" ")}" fill="none" stroke="${series.color}" stroke-width="1.2"${dash} data-series="${series.label ?? ""}"/>`
    );
  }
  return parts.join("\n");
}

export function renderFigure(
  panels: PanelSpec[],
  nCols: number,
  panelWidth = 320,
  panelHeight = 220
): string {
  const nRows = Math.ceil(panels.length / nCols);
  const width = nCols * panelWidth;
  const height = nRows * panelHeight;
  const body = panels
    .map((panel, i) => {
      const col = i % nCols;
      const row = Math.floor(i / nCols);
      return renderPanel(panel, col * panelWidth, row * panelHeight, panelWidth, panelHeight);
    })
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
