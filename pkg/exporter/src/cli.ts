#!/usr/bin/env node
/**
 * biaslens-export: produce biaslens input files from checkpoints and images.
 * Subcommands: export-emb, export-zs, mask. Exit 0 on success, 1 when any
 * image was skipped or a job failed.
 */

import './quiet.js';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { exportEmbeddings } from './embeddings.js';
import { readVocabulary } from './formats.js';
import { BoxesFileDetector, maskFaces } from './mask.js';
import { LayerSelector } from './model.js';
import { exportZeroShot } from './zeroshot.js';

function reportSkips(skipped: { file: string; reason: string }[]): number {
  for (const skip of skipped) {
    console.error(`skipped ${skip.file}: ${skip.reason}`);
  }
  return skipped.length === 0 ? 0 : 1;
}

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .scriptName('biaslens-export')
    .command(
      'export-emb',
      'extract feature embeddings into a biaslens .embj file',
      (y) =>
        y
          .option('checkpoint', { type: 'string', demandOption: true, describe: 'checkpoint directory (model.json + weights)' })
          .option('images', { type: 'string', demandOption: true, describe: 'image directory (.png/.ppm)' })
          .option('tags', { type: 'string', demandOption: true, describe: 'CSV: file,gender[,class]' })
          .option('layer', { choices: ['cnn-pre-fc', 'vit-pre-mlp'] as const, demandOption: true })
          .option('variant', { choices: ['biased', 'unbiased'] as const, demandOption: true })
          .option('iteration', { type: 'number', default: 1 })
          .option('masked', { type: 'boolean', default: false })
          .option('model-id', { type: 'string' })
          .option('class', { type: 'string', describe: 'default class for tag rows without one' })
          .option('out', { type: 'string', demandOption: true }),
      async (args) => {
        const result = await exportEmbeddings({
          checkpointDir: args.checkpoint,
          imagesDir: args.images,
          tagsPath: args.tags,
          layerSelector: args.layer as LayerSelector,
          variant: args.variant,
          iteration: args.iteration,
          masked: args.masked,
          modelId: args['model-id'],
          defaultClass: args.class,
          outPath: args.out,
        });
        console.log(`wrote ${result.written} records (dim ${result.dim}) to ${args.out}`);
        process.exitCode = reportSkips(result.skipped);
      },
    )
    .command(
      'export-zs',
      'zero-shot predictions over a vocabulary into a biaslens prediction CSV',
      (y) =>
        y
          .option('checkpoint', { type: 'string', demandOption: true, describe: 'image-encoder checkpoint directory' })
          .option('images', { type: 'string', demandOption: true })
          .option('tags', { type: 'string', demandOption: true, describe: 'CSV: file,gender' })
          .option('text-bank', { type: 'string', demandOption: true, describe: 'precomputed text embeddings JSON' })
          .option('vocab', { type: 'string', demandOption: true, describe: 'vocabulary file, one label per line' })
          .option('encoder-id', { type: 'string' })
          .option('out', { type: 'string', demandOption: true }),
      async (args) => {
        const result = await exportZeroShot({
          checkpointDir: args.checkpoint,
          imagesDir: args.images,
          tagsPath: args.tags,
          textBankPath: args['text-bank'],
          vocabulary: readVocabulary(args.vocab),
          encoderId: args['encoder-id'],
          outPath: args.out,
        });
        console.log(
          `wrote ${result.written} predictions to ${args.out} (text template: '${result.template}')`,
        );
        process.exitCode = reportSkips(result.skipped);
      },
    )
    .command(
      'mask',
      'black out detected face boxes, copying undetected images with a warning',
      (y) =>
        y
          .option('images', { type: 'string', demandOption: true })
          .option('out', { type: 'string', demandOption: true })
          .option('boxes', { type: 'string', demandOption: true, describe: 'detections JSON: {file: [{x,y,width,height}]}' }),
      async (args) => {
        const report = maskFaces(args.images, args.out, new BoxesFileDetector(args.boxes));
        for (const entry of report.copied) {
          console.warn(`warning: ${entry.file}: ${entry.warning}`);
        }
        console.log(
          `masked ${report.masked.length}, copied ${report.copied.length}, ` +
            `failed ${report.failed.length}; report in ${args.out}/mask_report.json`,
        );
        process.exitCode = report.failed.length === 0 ? 0 : 1;
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err ? `error: ${err.message}` : msg);
      process.exit(err ? 1 : 2);
    })
    .parse();
  void argv;
  return typeof process.exitCode === 'number' ? process.exitCode : 0;
}

main().catch((err) => {
  console.error(`error: ${err.message}`);
  process.exit(1);
});
