import type {
  CampaignDefinition,
  CampaignView,
  ChoiceTraceDoc,
  MethodId,
  MethodSpec,
  Problem,
  RawBallotDoc,
  ResultsView,
  Session,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly problem: Problem,
  ) {
    super(`${problem.code}: ${problem.message}`);
  }
}

/** Thin fetch wrapper for the versioned public API. Holds the session token;
 * every displayed number in the UI comes back through here. */
export class ApiClient {
  private token: string | null = null;

  constructor(private readonly baseUrl: string) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    extraHeaders?: Record<string, string>,
  ): Promise<T> {
    const headers: Record<string, string> = { ...extraHeaders };
    if (body !== undefined) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    if (!resp.ok) {
      let problem: Problem;
      try {
        problem = JSON.parse(text) as Problem;
      } catch {
        problem = { code: 'HTTPError', message: text.slice(0, 200) };
      }
      throw new ApiError(resp.status, problem);
    }
    const contentType = resp.headers.get('content-type') ?? '';
    return (contentType.includes('json') ? JSON.parse(text) : text) as T;
  }

  // auth

  register(email: string, role: 'designer' | 'voter'): Promise<void> {
    return this.request('POST', '/v1/auth/register', { email, role });
  }

  requestLoginCode(email: string): Promise<void> {
    return this.request('POST', '/v1/auth/login', { email });
  }

  async verify(email: string, code: string): Promise<Session> {
    const session = await this.request<Session>('POST', '/v1/auth/verify', { email, code });
    this.token = session.token;
    return session;
  }

  // catalog

  methodCatalog(): Promise<Record<MethodId, MethodSpec>> {
    return this.request('GET', '/v1/methods');
  }

  // designer

  createCampaign(definition: CampaignDefinition): Promise<CampaignView> {
    return this.request('POST', '/v1/campaigns', definition);
  }

  getCampaign(campaignId: string): Promise<CampaignView> {
    return this.request('GET', `/v1/campaigns/${campaignId}`);
  }

  openCampaign(campaignId: string): Promise<CampaignView> {
    return this.request('POST', `/v1/campaigns/${campaignId}/open`);
  }

  releaseResults(campaignId: string): Promise<CampaignView> {
    return this.request('POST', `/v1/campaigns/${campaignId}/release`);
  }

  /** CSV exports come back as text; JSON exports come back parsed. */
  exportDataset<T = unknown>(campaignId: string, kind: string, format: 'json' | 'csv'): Promise<T> {
    return this.request('GET', `/v1/campaigns/${campaignId}/export/${kind}?format=${format}`);
  }

  seedDemo(seed = 0): Promise<CampaignView> {
    return this.request('POST', `/v1/admin/seed?seed=${seed}`);
  }

  tick(): Promise<{ tallied: string[] }> {
    return this.request('POST', '/v1/admin/tick');
  }

  // voter

  subscribe(tags: string[]): Promise<{ tags: string[] }> {
    return this.request('POST', '/v1/subscriptions', { tags });
  }

  feed(cursor = 0): Promise<{ campaigns: CampaignView[]; next_cursor: number }> {
    return this.request('GET', `/v1/feed?cursor=${cursor}`);
  }

  submitBallot(
    campaignId: string,
    questionId: string,
    methodId: MethodId,
    ballot: RawBallotDoc,
    trace: ChoiceTraceDoc,
    idempotencyKey?: string,
  ): Promise<{ ballot_id: string; revision_index: number; change_count: number }> {
    const headers = idempotencyKey ? { 'Idempotency-Key': idempotencyKey } : undefined;
    return this.request(
      'POST',
      `/v1/campaigns/${campaignId}/ballot/${questionId}/${methodId}`,
      { ballot, trace },
      headers,
    );
  }

  results(campaignId: string, interim = false): Promise<ResultsView> {
    return this.request('GET', `/v1/campaigns/${campaignId}/results?interim=${interim}`);
  }

  submitFeedback(campaignId: string, questionId: string, rating: number, text?: string): Promise<void> {
    return this.request('POST', `/v1/campaigns/${campaignId}/feedback`, {
      question_id: questionId,
      rating,
      text: text ?? null,
    });
  }
}
