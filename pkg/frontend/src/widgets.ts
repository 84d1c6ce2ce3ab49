import { TraceRecorder } from './trace.js';
import type { MethodSpec, RawBallotDoc } from './types.js';

// Ballot widget state, one class per ballot shape. The admissible values
// come from the MethodSpec fetched from the server; nothing here hardcodes
// a level set. The server stays authoritative, but these widgets refuse to
// emit anything validate-time rules would reject, so the optimistic UI and
// the server agree.

export interface WidgetIssue {
  code: string;
  message: string;
  optionId?: string;
}

export abstract class BallotWidget {
  readonly trace = new TraceRecorder();

  constructor(
    readonly spec: MethodSpec,
    readonly optionIds: string[],
  ) {}

  /** Every per-option value this widget can ever emit, as exact strings. */
  abstract emittableValues(): string[];

  abstract issues(): WidgetIssue[];

  abstract toBallot(): RawBallotDoc;

  canSubmit(): boolean {
    return this.issues().length === 0;
  }
}

export class SingleChoiceWidget extends BallotWidget {
  private choice: string | null = null;

  select(optionId: string): void {
    if (!this.optionIds.includes(optionId)) {
      throw new Error(`unknown option ${optionId}`);
    }
    this.trace.touch();
    if (this.choice !== null && this.choice !== optionId) this.trace.changed();
    this.choice = optionId;
  }

  get selected(): string | null {
    return this.choice;
  }

  emittableValues(): string[] {
    return [...this.spec.score_levels];
  }

  issues(): WidgetIssue[] {
    return this.choice === null ? [{ code: 'EmptyBallot', message: 'pick an option' }] : [];
  }

  toBallot(): RawBallotDoc {
    if (this.choice === null) throw new Error('no option chosen');
    return { shape: 'single_choice', choice: this.choice };
  }
}

/** CAV / SV / AV: one level per option, all options required. CAV starts at
 * the neutral middle level; SV and AV start unset so an untouched option is
 * a visible gap rather than a silent zero. */
export class PerOptionScoreWidget extends BallotWidget {
  private readonly levels: Record<string, string> = {};

  constructor(spec: MethodSpec, optionIds: string[]) {
    super(spec, optionIds);
    if (spec.method_id === 'cav') {
      const neutral = spec.score_levels[Math.floor(spec.score_levels.length / 2)];
      for (const oid of optionIds) this.levels[oid] = neutral!;
    }
  }

  setLevel(optionId: string, level: string): void {
    if (!this.optionIds.includes(optionId)) {
      throw new Error(`unknown option ${optionId}`);
    }
    if (!this.spec.score_levels.includes(level)) {
      throw new Error(`level ${level} not admissible for ${this.spec.method_id}`);
    }
    this.trace.touch();
    const previous = this.levels[optionId];
    if (previous !== undefined && previous !== level) this.trace.changed();
    this.levels[optionId] = level;
  }

  levelOf(optionId: string): string | undefined {
    return this.levels[optionId];
  }

  emittableValues(): string[] {
    return [...this.spec.score_levels];
  }

  issues(): WidgetIssue[] {
    return this.optionIds
      .filter(oid => this.levels[oid] === undefined)
      .map(oid => ({ code: 'MissingOption', message: `rate ${oid}`, optionId: oid }));
  }

  toBallot(): RawBallotDoc {
    const scores: Record<string, string> = {};
    for (const oid of this.optionIds) {
      const level = this.levels[oid];
      if (level === undefined) throw new Error(`option ${oid} not rated`);
      scores[oid] = level;
    }
    return { shape: 'per_option_score', scores };
  }
}

/** MBC: drag-to-rank a subset. Rank r of m chosen among n options scores
 * (m - r + 1)/n, so the realizable values are i/n for i in 0..n. */
export class RankedSubsetWidget extends BallotWidget {
  private ranking: string[] = [];

  add(optionId: string): void {
    if (!this.optionIds.includes(optionId)) {
      throw new Error(`unknown option ${optionId}`);
    }
    if (this.ranking.includes(optionId)) {
      throw new Error(`${optionId} is already ranked`);
    }
    this.trace.touch();
    this.ranking.push(optionId);
  }

  remove(optionId: string): void {
    const i = this.ranking.indexOf(optionId);
    if (i < 0) return;
    this.trace.touch();
    this.trace.changed();
    this.ranking.splice(i, 1);
  }

  move(optionId: string, toIndex: number): void {
    const i = this.ranking.indexOf(optionId);
    if (i < 0) throw new Error(`${optionId} is not ranked`);
    this.trace.touch();
    if (i !== toIndex) this.trace.changed();
    this.ranking.splice(i, 1);
    this.ranking.splice(toIndex, 0, optionId);
  }

  get order(): string[] {
    return [...this.ranking];
  }

  emittableValues(): string[] {
    const n = this.optionIds.length;
    const out: string[] = [];
    for (let i = 0; i <= n; i++) {
      out.push(i === 0 ? '0' : i === n ? '1' : `${i}/${n}`);
    }
    return out;
  }

  issues(): WidgetIssue[] {
    return this.ranking.length === 0
      ? [{ code: 'EmptyBallot', message: 'rank at least one option' }]
      : [];
  }

  toBallot(): RawBallotDoc {
    return { shape: 'ranked_subset', ranking: [...this.ranking] };
  }
}

/** QV / CUMULATIVE: integer steppers with a live budget meter. QV cost is
 * the sum of squared votes against `budget`; cumulative is a plain point
 * sum against `points`. */
export class AllocationWidget extends BallotWidget {
  private readonly allocation: Record<string, number> = {};

  constructor(spec: MethodSpec, optionIds: string[]) {
    super(spec, optionIds);
    for (const oid of optionIds) this.allocation[oid] = 0;
  }

  setVotes(optionId: string, votes: number): void {
    if (!this.optionIds.includes(optionId)) {
      throw new Error(`unknown option ${optionId}`);
    }
    if (!Number.isInteger(votes) || votes < 0) {
      throw new Error('votes must be a nonnegative integer');
    }
    this.trace.touch();
    if (this.allocation[optionId] !== 0 && this.allocation[optionId] !== votes) {
      this.trace.changed();
    }
    this.allocation[optionId] = votes;
  }

  votesFor(optionId: string): number {
    return this.allocation[optionId] ?? 0;
  }

  get cost(): number {
    const values = Object.values(this.allocation);
    return this.spec.method_id === 'qv'
      ? values.reduce((acc, v) => acc + v * v, 0)
      : values.reduce((acc, v) => acc + v, 0);
  }

  get budget(): number {
    return this.spec.method_id === 'qv' ? this.spec.params['budget']! : this.spec.params['points']!;
  }

  emittableValues(): string[] {
    // any integer from 0 up to what the budget allows on a single option
    const max = this.spec.method_id === 'qv' ? Math.floor(Math.sqrt(this.budget)) : this.budget;
    return Array.from({ length: max + 1 }, (_, i) => String(i));
  }

  issues(): WidgetIssue[] {
    const issues: WidgetIssue[] = [];
    if (this.cost > this.budget) {
      issues.push({
        code: 'BudgetExceeded',
        message: `cost ${this.cost} over budget ${this.budget}`,
      });
    }
    if (Object.values(this.allocation).every(v => v === 0)) {
      issues.push({ code: 'EmptyBallot', message: 'allocate at least one vote' });
    }
    return issues;
  }

  toBallot(): RawBallotDoc {
    return { shape: 'integer_allocation', allocation: { ...this.allocation } };
  }
}

export function createWidget(spec: MethodSpec, optionIds: string[]): BallotWidget {
  switch (spec.ballot_shape) {
    case 'single_choice':
      return new SingleChoiceWidget(spec, optionIds);
    case 'per_option_score':
      return new PerOptionScoreWidget(spec, optionIds);
    case 'ranked_subset':
      return new RankedSubsetWidget(spec, optionIds);
    case 'integer_allocation':
      return new AllocationWidget(spec, optionIds);
  }
}
