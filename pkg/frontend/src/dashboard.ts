// Evaluation dashboard: four charts straight from the harness plot data.

import { distributionChart, gainBars, radarChart, scatterChart } from "./charts.js";
import type { EvalReportPayload } from "./types.js";

export const EMPTY_STATE_GUIDANCE =
  "No evaluation report found. Run `agroadvisor eval --records … --baseline … --out <dir>` " +
  "and point `eval.out_dir` at that directory, then reload.";

export function buildDashboard(payload: EvalReportPayload | null): string {
  if (!payload || !payload.plots || !payload.plots.distribution) {
    return `<section class="dashboard empty"><p>${EMPTY_STATE_GUIDANCE}</p></section>`;
  }
  const { distribution, radar, gains, scatter } = payload.plots;
  const blocks: string[] = ['<section class="dashboard">'];
  blocks.push(`<figure id="chart-distribution"><figcaption>Response quality distribution</figcaption>${distributionChart(distribution!)}</figure>`);
  if (radar) {
    blocks.push(`<figure id="chart-radar"><figcaption>Rubric comparison</figcaption>${radarChart(radar)}</figure>`);
  }
  if (gains) {
    blocks.push(`<figure id="chart-gains"><figcaption>Per-metric gain</figcaption>${gainBars(gains)}</figure>`);
  }
  if (scatter) {
    blocks.push(`<figure id="chart-scatter"><figcaption>Similarity vs quality</figcaption>${scatterChart(scatter)}</figure>`);
  }
  blocks.push("</section>");
  return blocks.join("");
}
