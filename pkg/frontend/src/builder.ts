import type { CampaignDefinition, MethodSpec, OptionDoc, QuestionDoc } from './types.js';

export interface BuilderIssue {
  field: string;
  message: string;
}

interface DraftQuestion {
  question_id: string;
  text: string;
  options: OptionDoc[];
  methods: MethodSpec[];
}

/** Designer-side campaign builder. Collects what the dashboard form holds
 * and emits the exact JSON definition the server accepts; method specs are
 * the catalog documents fetched from the server, toggled on per question,
 * never re-declared locally. */
export class CampaignBuilder {
  private campaignId: string | null = null;
  private title = '';
  private openAt: string | null = null;
  private closeAt: string | null = null;
  private tags: string[] = [];
  private questions: DraftQuestion[] = [];
  private orderPolicy: 'fixed' | 'randomized_per_voter' = 'fixed';
  private seed = 0;

  setCampaignId(id: string): this {
    this.campaignId = id;
    return this;
  }

  setTitle(title: string): this {
    this.title = title;
    return this;
  }

  setWindow(openAt: string, closeAt: string): this {
    this.openAt = openAt;
    this.closeAt = closeAt;
    return this;
  }

  setTags(tags: string[]): this {
    this.tags = [...tags].sort();
    return this;
  }

  setOrderPolicy(policy: 'fixed' | 'randomized_per_voter'): this {
    this.orderPolicy = policy;
    return this;
  }

  setSeed(seed: number): this {
    this.seed = seed;
    return this;
  }

  addQuestion(questionId: string, text: string, options: OptionDoc[]): this {
    this.questions.push({ question_id: questionId, text, options: [...options], methods: [] });
    return this;
  }

  /** Toggle a method on for a question, using the spec doc from GET /v1/methods. */
  enableMethod(questionId: string, spec: MethodSpec): this {
    const q = this.questions.find(q => q.question_id === questionId);
    if (!q) throw new Error(`no question ${questionId}`);
    if (q.methods.some(m => m.method_id === spec.method_id)) return this;
    q.methods.push(spec);
    return this;
  }

  disableMethod(questionId: string, methodId: string): this {
    const q = this.questions.find(q => q.question_id === questionId);
    if (q) q.methods = q.methods.filter(m => m.method_id !== methodId);
    return this;
  }

  /** Inline diagnostics; the Open button stays disabled while any exist. */
  issues(): BuilderIssue[] {
    const issues: BuilderIssue[] = [];
    if (!this.title) issues.push({ field: 'title', message: 'title is required' });
    if (!this.openAt || !this.closeAt) {
      issues.push({ field: 'window', message: 'open and close times are required' });
    } else if (Date.parse(this.closeAt) <= Date.parse(this.openAt)) {
      issues.push({ field: 'window', message: 'close must be after open' });
    }
    if (this.questions.length === 0) {
      issues.push({ field: 'questions', message: 'add at least one question' });
    }
    for (const q of this.questions) {
      if (q.options.length < 2) {
        issues.push({ field: `questions.${q.question_id}`, message: 'needs at least 2 options' });
      }
      if (q.methods.length === 0) {
        issues.push({ field: `questions.${q.question_id}`, message: 'enable at least one method' });
      }
    }
    return issues;
  }

  canOpen(): boolean {
    return this.issues().length === 0;
  }

  build(designerId: string): CampaignDefinition {
    if (!this.canOpen()) {
      throw new Error(this.issues().map(i => `${i.field}: ${i.message}`).join('; '));
    }
    const questions: QuestionDoc[] = this.questions.map(q => ({
      question_id: q.question_id,
      text: q.text,
      options: q.options,
      enabled_methods: q.methods,
    }));
    return {
      campaign_id: this.campaignId ?? `c-${crypto.randomUUID()}`,
      title: this.title,
      designer_id: designerId,
      open_at: this.openAt!,
      close_at: this.closeAt!,
      tags: this.tags,
      questions,
      method_order_policy: this.orderPolicy,
      parent_campaign_id: null,
      seed: this.seed,
    };
  }
}
