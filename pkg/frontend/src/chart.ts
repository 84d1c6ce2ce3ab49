import type { ConsistencyDoc } from './types.js';

// The consistency chart is a pure view: every number plotted is taken
// verbatim from the API payload. Nothing is recomputed client-side.

export interface ChartPoint {
  rank: number;
  value: number;
  label: string; // exact fraction string for the tooltip
}

export interface ConsistencyChartData {
  questionId: string;
  methods: string[];
  points: ChartPoint[];
  mean: number;
  meanLabel: string;
}

export function consistencyChartData(doc: ConsistencyDoc): ConsistencyChartData {
  return {
    questionId: doc.question_id,
    methods: [...doc.methods],
    points: doc.per_rank_decimal.map((value, i) => ({
      rank: i + 1,
      value,
      label: doc.per_rank[i]!,
    })),
    mean: doc.mean_decimal,
    meanLabel: doc.mean,
  };
}

/** Order questions for the dashboard: least consistent first, so the most
 * contested question leads the page. */
export function sortByMean(docs: ConsistencyDoc[]): ConsistencyDoc[] {
  return [...docs].sort((a, b) => a.mean_decimal - b.mean_decimal);
}
