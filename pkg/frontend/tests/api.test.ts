import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/api';
import { mockFetch } from './helpers';

describe('ApiClient', () => {
  it('hits the documented endpoints with JSON bodies', async () => {
    const { fn, calls } = mockFetch({
      'POST /api/v1/sessions': (body) => {
        expect(body).toEqual({
          dataset: { shape: 'skewed', n: 500, seed: 1 },
          params: { k: 3 },
        });
        return {
          status: 201,
          json: { schema_version: 1, session_id: 'abc', stage: 'Created' },
        };
      },
      'GET /api/v1/sessions/abc/plotdata': () => ({
        json: { schema_version: 1, stage: 'Created', summary: null, partition: null },
      }),
    });
    const api = new ApiClient('/api', fn);
    const created = await api.createSession({
      dataset: { shape: 'skewed', n: 500, seed: 1 },
      params: { k: 3 },
    });
    expect(created.session_id).toBe('abc');
    await api.plotdata('abc');
    expect(calls.map((c) => `${c.method} ${c.url}`)).toEqual([
      'POST /api/v1/sessions',
      'GET /api/v1/sessions/abc/plotdata',
    ]);
  });

  it('surfaces error payloads as ApiError with status', async () => {
    const { fn } = mockFetch({
      'POST /api/v1/sessions/abc/advance': () => ({
        status: 409,
        json: { detail: 'stage Finalized has no proposal to advance to' },
      }),
    });
    const api = new ApiClient('/api', fn);
    await expect(api.advance('abc')).rejects.toThrowError(ApiError);
    await expect(api.advance('abc')).rejects.toMatchObject({ status: 409 });
  });
});
