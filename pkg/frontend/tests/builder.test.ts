import { describe, expect, it } from 'vitest';

import { CampaignBuilder } from '../src/builder.js';
import type { MethodSpec } from '../src/types.js';

const mv: MethodSpec = { method_id: 'mv', score_levels: ['0', '1'], ballot_shape: 'single_choice', params: {} };

function draft() {
  return new CampaignBuilder()
    .setTitle('Lunch poll')
    .setWindow('2025-01-01T09:00:00Z', '2025-01-08T09:00:00Z')
    .setTags(['office'])
    .addQuestion('q1', 'Where to?', [
      { option_id: 'o1', label: 'Pizza' },
      { option_id: 'o2', label: 'Ramen' },
    ])
    .enableMethod('q1', mv);
}

describe('campaign builder', () => {
  it('a complete draft can open', () => {
    expect(draft().canOpen()).toBe(true);
  });

  it('close before open blocks opening with an inline error', () => {
    const b = draft().setWindow('2025-01-08T09:00:00Z', '2025-01-01T09:00:00Z');
    expect(b.canOpen()).toBe(false);
    expect(b.issues().map(i => i.field)).toContain('window');
    expect(() => b.build('d-1')).toThrow(/close must be after open/);
  });

  it('a question without methods blocks opening', () => {
    const b = draft().disableMethod('q1', 'mv');
    expect(b.issues().some(i => i.message.includes('method'))).toBe(true);
  });

  it('tags are kept sorted and the built doc carries the designer', () => {
    const doc = draft().setTags(['zeta', 'alpha']).setCampaignId('lunch').build('d-42');
    expect(doc.tags).toEqual(['alpha', 'zeta']);
    expect(doc.designer_id).toBe('d-42');
    expect(doc.campaign_id).toBe('lunch');
    expect(doc.method_order_policy).toBe('fixed');
    expect(doc.parent_campaign_id).toBeNull();
  });

  it('toggling a method twice is idempotent', () => {
    const doc = draft().enableMethod('q1', mv).build('d-1');
    expect(doc.questions[0]!.enabled_methods).toHaveLength(1);
  });
});
