// Minimal dependency-free SVG charts. Inputs are the harness's plot-data
// payloads, consumed as-is; the only transformation here is geometry.

import type { DistributionPlot, GainsPlot, RadarPlot, ScatterPlot } from "./types.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function svgOpen(w: number, h: number, cls: string): string {
  return `<svg class="chart ${cls}" viewBox="0 0 ${w} ${h}" xmlns="http://www.w3.org/2000/svg" role="img">`;
}

export function distributionChart(data: DistributionPlot): string {
  const w = 360;
  const h = 220;
  const max = Math.max(...data.values, 1);
  const barW = 80;
  const gap = 30;
  const parts = [svgOpen(w, h, "distribution")];
  data.labels.forEach((label, i) => {
    const v = data.values[i];
    const barH = (v / max) * 150;
    const x = 30 + i * (barW + gap);
    const y = 180 - barH;
    parts.push(`<rect x="${x}" y="${y}" width="${barW}" height="${barH}" data-value="${v}"/>`);
    parts.push(`<text x="${x + barW / 2}" y="${y - 6}" text-anchor="middle">${v.toFixed(1)}%</text>`);
    parts.push(`<text x="${x + barW / 2}" y="200" text-anchor="middle" class="label">${esc(label)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}

export function radarChart(data: RadarPlot): string {
  const w = 380;
  const h = 300;
  const cx = w / 2;
  const cy = 140;
  const radius = 100;
  const maxScore = 5;
  const n = data.metrics.length;
  const point = (value: number, i: number): string => {
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / n;
    const r = (value / maxScore) * radius;
    return `${(cx + r * Math.cos(angle)).toFixed(1)},${(cy + r * Math.sin(angle)).toFixed(1)}`;
  };
  const axisEnd = (i: number) => point(maxScore, i);
  const parts = [svgOpen(w, h, "radar")];
  for (let i = 0; i < n; i++) {
    const [x, y] = axisEnd(i).split(",");
    parts.push(`<line x1="${cx}" y1="${cy}" x2="${x}" y2="${y}" class="axis"/>`);
    parts.push(`<text x="${x}" y="${y}" class="label">${esc(data.metrics[i])}</text>`);
  }
  const candidate = data.candidate.map(point).join(" ");
  const baseline = data.baseline.map(point).join(" ");
  parts.push(`<polygon points="${baseline}" class="series baseline"/>`);
  parts.push(`<polygon points="${candidate}" class="series candidate"/>`);
  parts.push(
    `<text x="${cx}" y="${h - 18}" text-anchor="middle" class="composite">` +
      `composite ${data.composite.candidate} vs ${data.composite.baseline}</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}

export function gainBars(data: GainsPlot): string {
  const w = 420;
  const rowH = 30;
  const h = data.metrics.length * rowH + 20;
  const max = Math.max(...data.values.map(Math.abs), 1);
  const parts = [svgOpen(w, h, "gains")];
  data.metrics.forEach((metric, i) => {
    const v = data.values[i];
    const barW = (Math.abs(v) / max) * 220;
    const y = 10 + i * rowH;
    parts.push(`<text x="4" y="${y + 14}" class="label">${esc(metric)}</text>`);
    parts.push(`<rect x="150" y="${y}" width="${barW.toFixed(1)}" height="18" data-value="${v}"/>`);
    parts.push(`<text x="${154 + barW}" y="${y + 14}">${v >= 0 ? "+" : ""}${v.toFixed(1)}%</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}

export function scatterChart(data: ScatterPlot): string {
  const w = 380;
  const h = 260;
  const parts = [svgOpen(w, h, "scatter")];
  parts.push(`<line x1="40" y1="220" x2="360" y2="220" class="axis"/>`);
  parts.push(`<line x1="40" y1="220" x2="40" y2="20" class="axis"/>`);
  parts.push(`<text x="200" y="250" text-anchor="middle" class="label">similarity</text>`);
  for (const p of data.points) {
    const x = 40 + Math.min(Math.max(p.similarity, 0), 1) * 320;
    const y = 220 - ((p.composite - 1) / 4) * 200;
    parts.push(
      `<circle cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="4" data-question="${esc(p.question_id)}"` +
        ` data-similarity="${p.similarity}" data-composite="${p.composite}"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
