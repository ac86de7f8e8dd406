import type { CardChainDoc, PartitionDoc, SummaryDoc } from '../src/types';

/** The step-1 value-scale chain used across the tests. */
export function scaleChain(): CardChainDoc {
  return {
    domain: [2.8, 10.0],
    precision: 2,
    total: 100,
    anchors: [
      { label: 'a', cumulative: 0 },
      { label: 'v_1', cumulative: 14 },
      { label: 'v_2', cumulative: 40 },
      { label: 'v_3', cumulative: 59 },
      { label: 'v_4', cumulative: 76 },
      { label: 'v_5', cumulative: 96 },
      { label: 'b', cumulative: 100 },
    ],
    gaps: [14, 26, 19, 17, 20, 4],
  };
}

export function samplePartition(): PartitionDoc {
  return {
    bounds: [0, 1],
    classes: [
      {
        label: 'class_1',
        breakpoints: [
          [0, 1],
          [0.2, 1],
          [0.30104, 0.7654321],
          [0.5, 0],
        ],
        core: [0, 0.2],
        support: [0, 0.5],
      },
      {
        label: 'class_2',
        breakpoints: [
          [0.2, 0],
          [0.30104, 0.2345679],
          [0.5, 1],
          [1, 1],
        ],
        core: [0.5, 1],
        support: [0.2, 1],
      },
    ],
  };
}

export function sampleSummary(): SummaryDoc {
  return {
    n: 400,
    min: 0.01,
    max: 0.99,
    mean: 0.43,
    histogram: { bin_edges: [0, 0.5, 1], counts: [260, 140] },
    kde: { x: [0, 0.5, 1], density: [0.9, 1.4, 0.7] },
    bandwidth: 0.055,
  };
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/** Tiny route-table fetch mock; keys look like "POST /v1/sessions/s1/edits". */
export function mockFetch(
  routes: Record<string, (body: unknown) => { status?: number; json: unknown }>,
) {
  const calls: RecordedCall[] = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, method, body });
    const handler = routes[`${method} ${url}`];
    if (!handler) {
      return new Response(JSON.stringify({ detail: `no mock for ${method} ${url}` }), {
        status: 500,
      });
    }
    const { status = 200, json } = handler(body);
    return new Response(JSON.stringify(json), { status });
  };
  return { fn, calls };
}
