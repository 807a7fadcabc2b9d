/**
 * Train the mask generator and surrogate solver jointly, then export one
 * probability mask (PFM) per corpus image for the solver CLI to sample,
 * inpaint, and score.
 *
 *   ts-node src/train.ts --out runs/toy --images 32 --size 64 --epochs 200
 *   ts-node src/train.ts --out runs/full --corpus /data/pgms --full-scale
 */

import * as fs from 'fs';
import * as path from 'path';
import { parseArgs } from 'util';
import { synthImage, writeCorpus } from './corpus';
import { Grid, readPgm, writePfm } from './formats';
import { defaultConfig, Trainer } from './trainer';

async function main() {
  const { values } = parseArgs({
    options: {
      out: { type: 'string' },
      corpus: { type: 'string' },
      images: { type: 'string', default: '32' },
      size: { type: 'string', default: '64' },
      epochs: { type: 'string', default: '200' },
      density: { type: 'string', default: '0.05' },
      alpha: { type: 'string', default: '0.01' },
      lr: { type: 'string', default: '5e-4' },
      batch: { type: 'string', default: '4' },
      seed: { type: 'string', default: '0' },
      'full-scale': { type: 'boolean', default: false },
    },
  });
  if (!values.out) throw new Error('--out is required');
  const argv = {
    out: values.out,
    corpus: values.corpus,
    images: Number(values.images),
    size: Number(values.size),
    epochs: Number(values.epochs),
    density: Number(values.density),
    alpha: Number(values.alpha),
    lr: Number(values.lr),
    batch: Number(values.batch),
    seed: Number(values.seed),
    fullScale: values['full-scale'] as boolean,
  };

  const outDir = argv.out;
  fs.mkdirSync(outDir, { recursive: true });

  let corpus: Grid[];
  let names: string[];
  if (argv.corpus) {
    names = fs.readdirSync(argv.corpus).filter((n) => n.endsWith('.pgm')).sort();
    if (names.length === 0) throw new Error(`no PGM images in ${argv.corpus}`);
    corpus = names.map((n) => readPgm(path.join(argv.corpus!, n)));
  } else {
    names = [];
    corpus = [];
    for (let i = 0; i < argv.images; i++) {
      names.push(`img${String(i).padStart(3, '0')}.pgm`);
      corpus.push(synthImage(argv.seed * 1000 + i, argv.size));
    }
    writeCorpus(corpus, names, path.join(outDir, 'corpus'));
  }

  const cfg = defaultConfig({
    density: argv.density,
    alpha: argv.alpha,
    lr: argv.lr,
    epochs: argv.fullScale ? 4000 : argv.epochs,
    batchSize: argv.batch,
    seed: argv.seed,
    fullScale: argv.fullScale,
  });
  const trainer = new Trainer(cfg);

  const t0 = Date.now();
  trainer.fit(corpus, (log) => {
    if (log.epoch % 10 === 0 || log.epoch === cfg.epochs - 1) {
      console.log(
        `epoch ${log.epoch}: L_I=${log.inpaintingLoss.toExponential(3)} ` +
          `L_R=${log.residualLoss.toExponential(3)} mask mean=${log.maskMean.toFixed(4)}`
      );
    }
  });
  console.log(`trained ${cfg.epochs} epochs in ${((Date.now() - t0) / 1000).toFixed(0)} s`);

  const maskDir = path.join(outDir, 'masks');
  fs.mkdirSync(maskDir, { recursive: true });
  corpus.forEach((img, i) => {
    const stem = names[i].replace(/\.pgm$/, '');
    writePfm(path.join(maskDir, `${stem}.pfm`), trainer.exportMask(img));
  });
  trainer.writeLogCsv(path.join(outDir, 'training_log.csv'));
  trainer.saveCheckpoint(path.join(outDir, 'checkpoint.json'));
  console.log(`exported ${corpus.length} masks to ${maskDir}`);
}

main().catch((err) => {
  console.error(err.message ?? err);
  process.exit(1);
});
