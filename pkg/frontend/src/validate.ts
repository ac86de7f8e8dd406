/** Client-side mirror of the chain invariants, for instant feedback.
 * The server stays authoritative; this only pre-validates pending edits. */

import type { CardChainDoc, CardEditDoc } from './types';

export const MIN_GAP = 1;

export class ChainEditError extends Error {}

export function chainTotal(chain: CardChainDoc): number {
  return chain.gaps.reduce((a, b) => a + b, 0);
}

/** Apply one edit to a chain, returning a new chain document. */
export function applyEdit(chain: CardChainDoc, edit: CardEditDoc): CardChainDoc {
  if (edit.count < 1) {
    throw new ChainEditError(`edit count must be positive, got ${edit.count}`);
  }
  const gaps = [...chain.gaps];
  const check = (i: number) => {
    if (i < 0 || i >= gaps.length) {
      throw new ChainEditError(`gap index ${i} out of range 0..${gaps.length - 1}`);
    }
  };
  check(edit.gap_index);
  const take = (i: number, count: number) => {
    if ((gaps[i] as number) - count < MIN_GAP) {
      throw new ChainEditError(
        `removing ${count} cards would collapse gap ${i} (has ${gaps[i]})`,
      );
    }
    gaps[i] = (gaps[i] as number) - count;
  };
  switch (edit.kind) {
    case 'insert':
      gaps[edit.gap_index] = (gaps[edit.gap_index] as number) + edit.count;
      break;
    case 'remove':
      take(edit.gap_index, edit.count);
      break;
    case 'move': {
      if (edit.target_gap_index === undefined) {
        throw new ChainEditError('move edits need a target_gap_index');
      }
      check(edit.target_gap_index);
      if (edit.target_gap_index === edit.gap_index) {
        throw new ChainEditError('move source and target gaps must differ');
      }
      take(edit.gap_index, edit.count);
      gaps[edit.target_gap_index] = (gaps[edit.target_gap_index] as number) + edit.count;
      break;
    }
  }
  const total = gaps.reduce((a, b) => a + b, 0);
  let cumulative = 0;
  const anchors = chain.anchors.map((a, i) => {
    if (i > 0) cumulative += gaps[i - 1] as number;
    return { label: a.label, cumulative };
  });
  return { ...chain, gaps, anchors, total };
}

/** Apply a whole pending-edit list; throws on the first invalid edit. */
export function applyEdits(chain: CardChainDoc, edits: CardEditDoc[]): CardChainDoc {
  let working = chain;
  edits.forEach((edit, i) => {
    try {
      working = applyEdit(working, edit);
    } catch (err) {
      throw new ChainEditError(`edit ${i} invalid: ${(err as Error).message}`);
    }
  });
  return working;
}

/** Decoded anchor positions under the cumulative-card rule. */
export function decodeValues(chain: CardChainDoc): number[] {
  const [lo, hi] = chain.domain;
  const total = chainTotal(chain);
  const values: number[] = [];
  let cumulative = 0;
  for (let i = 0; i < chain.anchors.length; i++) {
    if (i > 0) cumulative += chain.gaps[i - 1] as number;
    values.push(lo + ((hi - lo) * cumulative) / total);
  }
  values[0] = lo;
  values[values.length - 1] = hi;
  return values;
}
