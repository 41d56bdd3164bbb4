/**
 * Minimal self-contained SVG chart builder: one x/y plot area with
 * linear or log10 axes, polylines and circle markers. No dependencies,
 * so the figures render anywhere an .svg file opens.
 */

export type ScaleKind = "linear" | "log";

export interface AxisSpec {
  label: string;
  kind: ScaleKind;
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 68, right: 16, top: 34, bottom: 52 };

function niceLinearTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step0 = span / n;
  const mag = 10 ** Math.floor(Math.log10(step0));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= n) ?? mag * 10;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function makeScale(kind: ScaleKind, lo: number, hi: number, r0: number, r1: number): Scale {
  if (kind === "log") {
    const [l0, l1] = [Math.log10(lo), Math.log10(hi)];
    const f = (v: number) => r0 + ((Math.log10(v) - l0) / (l1 - l0 || 1)) * (r1 - r0);
    const ticks: number[] = [];
    for (let d = Math.ceil(l0); d <= Math.floor(l1); d++) ticks.push(10 ** d);
    return Object.assign(f, { ticks: ticks.length >= 2 ? ticks : [lo, hi] });
  }
  const f = (v: number) => r0 + ((v - lo) / (hi - lo || 1)) * (r1 - r0);
  return Object.assign(f, { ticks: niceLinearTicks(lo, hi) });
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(6)));
  return v.toExponential(0);
}

export interface Polyline {
  series: { x: number[]; y: number[] };
  stroke: string;
  width: number;
  opacity: number;
  cssClass: string;
}

export interface MarkerSet {
  series: { x: number[]; y: number[] };
  fill: string;
  cssClass: string;
}

export class Figure {
  private lines: Polyline[] = [];
  private markers: MarkerSet[] = [];

  constructor(
    private title: string,
    private xAxis: AxisSpec,
    private yAxis: AxisSpec,
  ) {}

  addLine(line: Polyline): void {
    this.lines.push(line);
  }

  addMarkers(m: MarkerSet): void {
    this.markers.push(m);
  }

  private extent(pick: "x" | "y", kind: ScaleKind): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    const scan = (vals: number[]) => {
      for (const v of vals) {
        if (!Number.isFinite(v)) continue;
        if (kind === "log" && v <= 0) continue;
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    };
    for (const l of this.lines) scan(l.series[pick]);
    for (const m of this.markers) scan(m.series[pick]);
    if (!(lo < hi)) [lo, hi] = kind === "log" ? [0.001, 1] : [0, 1];
    if (kind === "linear") {
      const pad = 0.04 * (hi - lo || 1);
      return [lo - pad, hi + pad];
    }
    return [lo / 1.15, hi * 1.15];
  }

  render(): string {
    const [x0, x1] = this.extent("x", this.xAxis.kind);
    const [y0, y1] = this.extent("y", this.yAxis.kind);
    const sx = makeScale(this.xAxis.kind, x0, x1, MARGIN.left, WIDTH - MARGIN.right);
    const sy = makeScale(this.yAxis.kind, y0, y1, HEIGHT - MARGIN.bottom, MARGIN.top);
    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="14">${this.title}</text>`,
    );
    // axes, ticks, grid
    const bottom = HEIGHT - MARGIN.bottom;
    for (const t of sx.ticks) {
      const px = sx(t);
      parts.push(
        `<line x1="${px.toFixed(1)}" y1="${MARGIN.top}" x2="${px.toFixed(1)}" y2="${bottom}" stroke="#eee"/>`,
        `<line x1="${px.toFixed(1)}" y1="${bottom}" x2="${px.toFixed(1)}" y2="${bottom + 5}" stroke="black"/>`,
        `<text x="${px.toFixed(1)}" y="${bottom + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
      );
    }
    for (const t of sy.ticks) {
      const py = sy(t);
      parts.push(
        `<line x1="${MARGIN.left}" y1="${py.toFixed(1)}" x2="${WIDTH - MARGIN.right}" y2="${py.toFixed(1)}" stroke="#eee"/>`,
        `<line x1="${MARGIN.left - 5}" y1="${py.toFixed(1)}" x2="${MARGIN.left}" y2="${py.toFixed(1)}" stroke="black"/>`,
        `<text x="${MARGIN.left - 8}" y="${(py + 4).toFixed(1)}" text-anchor="end">${fmtTick(t)}</text>`,
      );
    }
    parts.push(
      `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
        `height="${bottom - MARGIN.top}" fill="none" stroke="black"/>`,
      `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 12}" ` +
        `text-anchor="middle">${this.xAxis.label}</text>`,
      `<text x="16" y="${(MARGIN.top + bottom) / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(MARGIN.top + bottom) / 2})">${this.yAxis.label}</text>`,
    );
    for (const l of this.lines) {
      const pts: string[] = [];
      for (let i = 0; i < l.series.x.length; i++) {
        const [vx, vy] = [l.series.x[i], l.series.y[i]];
        if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
        if (this.xAxis.kind === "log" && vx <= 0) continue;
        if (this.yAxis.kind === "log" && vy <= 0) continue;
        pts.push(`${sx(vx).toFixed(2)},${sy(vy).toFixed(2)}`);
      }
      if (pts.length < 2) continue;
      parts.push(
        `<polyline class="${l.cssClass}" points="${pts.join(" ")}" fill="none" ` +
          `stroke="${l.stroke}" stroke-width="${l.width}" opacity="${l.opacity}"/>`,
      );
    }
    for (const m of this.markers) {
      const circles: string[] = [];
      for (let i = 0; i < m.series.x.length; i++) {
        const [vx, vy] = [m.series.x[i], m.series.y[i]];
        if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
        if (this.xAxis.kind === "log" && vx <= 0) continue;
        circles.push(
          `<circle cx="${sx(vx).toFixed(2)}" cy="${sy(vy).toFixed(2)}" r="3.5" ` +
            `fill="${m.fill}" stroke="black" stroke-width="0.7"/>`,
        );
      }
      parts.push(`<g class="${m.cssClass}">${circles.join("")}</g>`);
    }
    parts.push("</svg>");
    return parts.join("\n");
  }
}
