#!/usr/bin/env node
/** Command line front end.
 *
 * sparsity-trainer --arch lenet --gamma 1e-3 --epochs 20 \
 *     --taps conv1,conv2 --out run.csv
 *
 * With --baseline the same seed is retrained at gamma = 0 and a
 * comparison CSV (and optional plots) land next to the run file.
 */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { loadImageFolder } from './folder.js';
import { ACTIVATIONS, ActivationName } from './model.js';
import { defaultGamma } from './penalty.js';
import { writeComparisonCsv, writeCurveSvgs, writeRunCsv } from './report.js';
import { MetricsRecord, train } from './train.js';

function summarize(record: MetricsRecord): string {
  const last = record.rows[record.rows.length - 1];
  return `${record.label}: acc ${(100 * last.testAccuracy).toFixed(1)}% ` +
    `l1/dim ${last.l1DimMean.toExponential(3)}`;
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option('arch', { type: 'string', default: 'lenet', choices: ['lenet'] })
    .option('activation', {
      type: 'string', default: 'relu', choices: ACTIVATIONS,
    })
    .option('gamma', {
      type: 'number',
      describe: 'penalty weight; default is the per-activation grid value',
    })
    .option('epochs', { type: 'number', default: 20 })
    .option('taps', { type: 'string', default: 'conv1,conv2' })
    .option('seed', { type: 'number', default: 0 })
    .option('images', { type: 'number', default: 768 })
    .option('lr', { type: 'number', default: 0.02 })
    .option('data', {
      type: 'string',
      describe: 'image folder with one subdirectory per class (png/pgm)',
    })
    .option('out', { type: 'string', demandOption: true })
    .option('baseline', { type: 'boolean', default: false })
    .option('plots', { type: 'boolean', default: false })
    .strict()
    .parse();

  const activation = args.activation as ActivationName;
  const gamma = args.gamma ?? defaultGamma(activation);
  const taps = args.taps.split(',').map((t) => t.trim()).filter((t) => t);
  const data = args.data === undefined
    ? undefined
    : loadImageFolder(args.data, { seed: args.seed });

  const common = {
    arch: 'lenet' as const,
    activation,
    taps,
    epochs: args.epochs,
    seed: args.seed,
    images: args.images,
    learningRate: args.lr,
    data,
  };
  const record = await train({ ...common, gamma });
  writeRunCsv(args.out, record);
  console.log(`wrote ${args.out}`);
  console.log(summarize(record));

  const records = [record];
  if (args.baseline && gamma !== 0) {
    const base = await train({ ...common, gamma: 0, label: 'gamma=0' });
    records.push(base);
    const stem = args.out.replace(/\.csv$/, '');
    writeRunCsv(`${stem}_baseline.csv`, base);
    writeComparisonCsv(`${stem}_compare.csv`, records);
    console.log(summarize(base));
    const a = record.rows[record.rows.length - 1];
    const b = base.rows[base.rows.length - 1];
    const drop = 100 * (1 - a.l1DimMean / b.l1DimMean);
    const dAcc = 100 * (a.testAccuracy - b.testAccuracy);
    console.log(`l1/dim reduction ${drop.toFixed(1)}% ` +
                `accuracy delta ${dAcc.toFixed(1)}pp`);
  }
  if (args.plots) {
    const stem = args.out.replace(/\.csv$/, '');
    for (const p of writeCurveSvgs(stem, records)) {
      console.log(`wrote ${p}`);
    }
  }
  return 0;
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url.endsWith(entry.split('/').pop()!)) {
  main(hideBin(process.argv)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(String(err));
      process.exit(1);
    },
  );
}
