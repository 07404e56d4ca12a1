/** CSV and plot output in the conventions of the companion suite:
 * floats with 17 significant digits so reruns diff clean, and small
 * dependency-free SVG polyline plots.
 */

import * as fs from 'node:fs';

import { MetricsRecord } from './train.js';

/** Format a float like printf %.17g: 17 significant digits, trimmed. */
export function fmtG17(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  if (Number.isInteger(v) && Math.abs(v) < 1e16) return String(v);
  const s = v.toPrecision(17);
  const [mantissa, exponent] = s.split('e');
  let m = mantissa;
  if (m.includes('.')) m = m.replace(/0+$/, '').replace(/\.$/, '');
  return exponent === undefined ? m : `${m}e${exponent}`;
}

function sanitizeLabel(label: string): string {
  return label.replace(/[^A-Za-z0-9_.-]+/g, '_');
}

/** One CSV row per epoch: loss, accuracy, penalty and the l1 taps. */
export function runToCsv(record: MetricsRecord): string {
  const header = ['epoch', 'train_loss', 'test_acc', 'penalty',
                  ...record.taps.map((t) => `l1_dim_${t}`), 'l1_dim_mean'];
  const lines = [header.join(',')];
  for (const row of record.rows) {
    lines.push([
      String(row.epoch),
      fmtG17(row.trainLoss),
      fmtG17(row.testAccuracy),
      fmtG17(row.penalty),
      ...record.taps.map((t) => fmtG17(row.l1Dim[t])),
      fmtG17(row.l1DimMean),
    ].join(','));
  }
  return lines.join('\n') + '\n';
}

/** Aligned comparison columns for several records, one block each. */
export function comparisonToCsv(records: MetricsRecord[]): string {
  if (records.length === 0) {
    throw new Error('comparison needs at least one record');
  }
  const epochs = Math.min(...records.map((r) => r.rows.length));
  const header = ['epoch'];
  for (const r of records) {
    const tag = sanitizeLabel(r.label);
    header.push(`${tag}_train_loss`, `${tag}_test_acc`, `${tag}_l1_dim_mean`);
  }
  const lines = [header.join(',')];
  for (let i = 0; i < epochs; i++) {
    const cells = [String(records[0].rows[i].epoch)];
    for (const r of records) {
      const row = r.rows[i];
      cells.push(fmtG17(row.trainLoss), fmtG17(row.testAccuracy),
                 fmtG17(row.l1DimMean));
    }
    lines.push(cells.join(','));
  }
  return lines.join('\n') + '\n';
}

export interface Series {
  label: string;
  values: number[];
}

const COLORS = ['steelblue', 'darkorange', 'seagreen', 'firebrick',
                'mediumpurple'];

/** Minimal multi-series polyline plot, no plotting dependency. */
export function curveSvg(title: string, series: Series[]): string {
  const w = 480;
  const h = 320;
  const pad = 42;
  const all = series.flatMap((s) => s.values);
  let lo = Math.min(...all);
  let hi = Math.max(...all);
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}">`,
    `<rect width="${w}" height="${h}" fill="white"/>`,
    `<line x1="${pad}" y1="${h - pad}" x2="${w - pad}" y2="${h - pad}" ` +
      'stroke="black"/>',
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${h - pad}" ` +
      'stroke="black"/>',
  ];
  series.forEach((s, si) => {
    const pts = s.values.map((v, i) => {
      const px = pad + (w - 2 * pad) * (i / Math.max(s.values.length - 1, 1));
      const py = pad + (h - 2 * pad) * (1 - (v - lo) / (hi - lo));
      return `${px.toFixed(1)},${py.toFixed(1)}`;
    });
    const color = COLORS[si % COLORS.length];
    parts.push(`<polyline points="${pts.join(' ')}" fill="none" ` +
               `stroke="${color}"/>`);
    parts.push(`<text x="${pad + 4}" y="${16 + 14 * si}" font-size="12" ` +
               `fill="${color}">${s.label}</text>`);
  });
  parts.push(`<text x="${w - pad - 6 * title.length}" y="16" ` +
             `font-size="12">${title}</text>`);
  parts.push('</svg>');
  return parts.join('\n') + '\n';
}

export function writeRunCsv(path: string, record: MetricsRecord): void {
  fs.writeFileSync(path, runToCsv(record));
}

export function writeComparisonCsv(path: string,
                                   records: MetricsRecord[]): void {
  fs.writeFileSync(path, comparisonToCsv(records));
}

/** Loss, accuracy and l1 curves for a set of records, three SVG files. */
export function writeCurveSvgs(prefix: string,
                               records: MetricsRecord[]): string[] {
  const specs: [string, string, (r: MetricsRecord) => number[]][] = [
    ['loss', 'train loss', (r) => r.rows.map((x) => x.trainLoss)],
    ['acc', 'test accuracy', (r) => r.rows.map((x) => x.testAccuracy)],
    ['l1', 'mean l1/dim', (r) => r.rows.map((x) => x.l1DimMean)],
  ];
  const written: string[] = [];
  for (const [stem, title, pick] of specs) {
    const path = `${prefix}_${stem}.svg`;
    fs.writeFileSync(path, curveSvg(title, records.map((r) => ({
      label: sanitizeLabel(r.label),
      values: pick(r),
    }))));
    written.push(path);
  }
  return written;
}
