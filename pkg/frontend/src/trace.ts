import type { ChoiceTraceDoc } from './types.js';

/** Records the behavioral metadata the server stores alongside a ballot:
 * when the form opened, the first touch, how often the voter changed an
 * already-made decision, and when it was submitted. */
export class TraceRecorder {
  private readonly openedAt: Date;
  private firstInteractionAt: Date | null = null;
  private inFormChanges = 0;

  constructor(now: Date = new Date()) {
    this.openedAt = now;
  }

  touch(now: Date = new Date()): void {
    if (this.firstInteractionAt === null) this.firstInteractionAt = now;
  }

  /** A decision that overwrites a previous one. First-time picks don't count. */
  changed(): void {
    this.inFormChanges += 1;
  }

  get changeCount(): number {
    return this.inFormChanges;
  }

  finish(now: Date = new Date()): ChoiceTraceDoc {
    const iso = (d: Date) => d.toISOString().replace(/\.\d{3}Z$/, 'Z');
    return {
      ballot_opened_at: iso(this.openedAt),
      first_interaction_at: iso(this.firstInteractionAt ?? now),
      submitted_at: iso(now),
      in_form_changes: this.inFormChanges,
    };
  }
}
