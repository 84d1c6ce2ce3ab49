export * from './types.js';
export { ApiClient, ApiError } from './client.js';
export { TraceRecorder } from './trace.js';
export {
  AllocationWidget,
  BallotWidget,
  PerOptionScoreWidget,
  RankedSubsetWidget,
  SingleChoiceWidget,
  createWidget,
} from './widgets.js';
export { CampaignBuilder } from './builder.js';
export { consistencyChartData, sortByMean } from './chart.js';
