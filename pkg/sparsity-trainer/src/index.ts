export { ImageSet, ToyOptions, makeToyImageSet } from './data.js';
export { FolderOptions, loadImageFolder } from './folder.js';
export { ACTIVATIONS, ActivationName, LenetModel, ModelOptions } from
  './model.js';
export { PenaltyConfig, TapNotFound, defaultGamma, penaltyTerm,
         validatePenalty } from './penalty.js';
export { Series, comparisonToCsv, curveSvg, fmtG17, runToCsv,
         writeComparisonCsv, writeCurveSvgs, writeRunCsv } from './report.js';
export { EpochMetrics, MetricsRecord, NonFiniteLoss, TrainOptions, train }
  from './train.js';
export { gaussian, mulberry32, permutation } from './rng.js';
