import { describe, expect, it } from 'vitest';

import {
  AllocationWidget,
  PerOptionScoreWidget,
  RankedSubsetWidget,
  SingleChoiceWidget,
  createWidget,
} from '../src/widgets.js';
import type { MethodSpec } from '../src/types.js';

const OPTIONS = ['o1', 'o2', 'o3', 'o4', 'o5'];

const mv: MethodSpec = { method_id: 'mv', score_levels: ['0', '1'], ballot_shape: 'single_choice', params: {} };
const cav: MethodSpec = { method_id: 'cav', score_levels: ['0', '1/2', '1'], ballot_shape: 'per_option_score', params: {} };
const sv: MethodSpec = { method_id: 'sv', score_levels: ['0', '1/5', '2/5', '3/5', '4/5', '1'], ballot_shape: 'per_option_score', params: {} };
const mbc: MethodSpec = { method_id: 'mbc', score_levels: [], ballot_shape: 'ranked_subset', params: {} };
const qv: MethodSpec = { method_id: 'qv', score_levels: [], ballot_shape: 'integer_allocation', params: { budget: 100 } };
const cumulative: MethodSpec = { method_id: 'cumulative', score_levels: [], ballot_shape: 'integer_allocation', params: { points: 10 } };

describe('single choice widget', () => {
  it('needs a selection before it can submit', () => {
    const w = new SingleChoiceWidget(mv, OPTIONS);
    expect(w.canSubmit()).toBe(false);
    w.select('o2');
    expect(w.canSubmit()).toBe(true);
    expect(w.toBallot()).toEqual({ shape: 'single_choice', choice: 'o2' });
  });

  it('counts changed decisions, not first picks', () => {
    const w = new SingleChoiceWidget(mv, OPTIONS);
    w.select('o1');
    expect(w.trace.changeCount).toBe(0);
    w.select('o1');
    expect(w.trace.changeCount).toBe(0);
    w.select('o3');
    expect(w.trace.changeCount).toBe(1);
  });

  it('rejects unknown options', () => {
    const w = new SingleChoiceWidget(mv, OPTIONS);
    expect(() => w.select('nope')).toThrow();
  });
});

describe('per-option score widget', () => {
  it('cav defaults every option to the neutral middle level', () => {
    const w = new PerOptionScoreWidget(cav, OPTIONS);
    expect(w.levelOf('o1')).toBe('1/2');
    expect(w.canSubmit()).toBe(true);
  });

  it('sv starts unset and blocks submission until complete', () => {
    const w = new PerOptionScoreWidget(sv, ['o1', 'o2']);
    expect(w.issues().map(i => i.optionId)).toEqual(['o1', 'o2']);
    w.setLevel('o1', '2/5');
    w.setLevel('o2', '1');
    expect(w.canSubmit()).toBe(true);
    expect(w.toBallot()).toEqual({ shape: 'per_option_score', scores: { o1: '2/5', o2: '1' } });
  });

  it('only admits levels from the fetched spec', () => {
    const w = new PerOptionScoreWidget(sv, OPTIONS);
    expect(() => w.setLevel('o1', '1/4')).toThrow(/not admissible/);
    expect(() => w.setLevel('o1', '0.2')).toThrow(/not admissible/); // exact strings, no aliases
  });

  it('counts overwrites as in-form changes', () => {
    const w = new PerOptionScoreWidget(sv, ['o1', 'o2']);
    w.setLevel('o1', '1/5');
    w.setLevel('o1', '4/5');
    expect(w.trace.changeCount).toBe(1);
  });
});

describe('ranked subset widget', () => {
  it('builds an ordered subset and emits it as a ranking', () => {
    const w = new RankedSubsetWidget(mbc, OPTIONS);
    w.add('o3');
    w.add('o1');
    w.add('o5');
    w.move('o5', 0);
    expect(w.order).toEqual(['o5', 'o3', 'o1']);
    expect(w.toBallot()).toEqual({ shape: 'ranked_subset', ranking: ['o5', 'o3', 'o1'] });
  });

  it('refuses duplicates and empty submissions', () => {
    const w = new RankedSubsetWidget(mbc, OPTIONS);
    expect(w.canSubmit()).toBe(false);
    w.add('o1');
    expect(() => w.add('o1')).toThrow(/already ranked/);
  });

  it('realizable values are i/n for the question size', () => {
    const w = new RankedSubsetWidget(mbc, OPTIONS);
    expect(w.emittableValues()).toEqual(['0', '1/5', '2/5', '3/5', '4/5', '1']);
  });
});

describe('allocation widgets', () => {
  it('qv meter blocks submission over the quadratic budget', () => {
    const w = new AllocationWidget(qv, OPTIONS);
    w.setVotes('o1', 9); // cost 81
    w.setVotes('o2', 4); // +16 = 97
    expect(w.cost).toBe(97);
    expect(w.canSubmit()).toBe(true);
    w.setVotes('o3', 2); // +4 = 101
    expect(w.issues().map(i => i.code)).toContain('BudgetExceeded');
  });

  it('cumulative spends plain points', () => {
    const w = new AllocationWidget(cumulative, OPTIONS);
    w.setVotes('o1', 6);
    w.setVotes('o2', 4);
    expect(w.cost).toBe(10);
    expect(w.canSubmit()).toBe(true);
    w.setVotes('o2', 5);
    expect(w.issues().map(i => i.code)).toContain('BudgetExceeded');
  });

  it('an all-zero allocation cannot submit', () => {
    const w = new AllocationWidget(qv, OPTIONS);
    expect(w.issues().map(i => i.code)).toContain('EmptyBallot');
  });

  it('rejects fractional or negative votes', () => {
    const w = new AllocationWidget(qv, OPTIONS);
    expect(() => w.setVotes('o1', 1.5)).toThrow();
    expect(() => w.setVotes('o1', -1)).toThrow();
  });
});

describe('widget factory', () => {
  it('picks the widget class by ballot shape', () => {
    expect(createWidget(mv, OPTIONS)).toBeInstanceOf(SingleChoiceWidget);
    expect(createWidget(cav, OPTIONS)).toBeInstanceOf(PerOptionScoreWidget);
    expect(createWidget(mbc, OPTIONS)).toBeInstanceOf(RankedSubsetWidget);
    expect(createWidget(cumulative, OPTIONS)).toBeInstanceOf(AllocationWidget);
  });
});
