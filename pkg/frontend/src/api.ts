/** Thin typed client for the /v1 session API. */

import type {
  AdvanceResponse,
  CardEditDoc,
  CommitResponse,
  EditsResponse,
  EditTarget,
  PlotdataResponse,
  SessionDoc,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface CreateSessionBody {
  dataset:
    | { values: number[]; bounds?: [number, number] }
    | { shape: string; n?: number; seed?: number; bounds?: [number, number] };
  params: Record<string, number | string>;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (url, init) => globalThis.fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const doc = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      throw new ApiError(resp.status, String(doc.detail ?? text));
    }
    return doc as T;
  }

  createSession(body: CreateSessionBody) {
    return this.request<{ schema_version: number; session_id: string; stage: string }>(
      'POST',
      '/v1/sessions',
      body,
    );
  }

  getSession(id: string) {
    return this.request<SessionDoc>('GET', `/v1/sessions/${id}`);
  }

  advance(id: string, body?: { class: number; side: 'left' | 'right'; k_side?: number }) {
    return this.request<AdvanceResponse>('POST', `/v1/sessions/${id}/advance`, body);
  }

  applyEdits(id: string, edits: CardEditDoc[], target?: EditTarget) {
    return this.request<EditsResponse>('POST', `/v1/sessions/${id}/edits`, {
      edits,
      target: target ?? null,
    });
  }

  commit(id: string) {
    return this.request<CommitResponse>('POST', `/v1/sessions/${id}/commit`);
  }

  plotdata(id: string) {
    return this.request<PlotdataResponse>('GET', `/v1/sessions/${id}/plotdata`);
  }
}
