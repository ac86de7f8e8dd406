/** Card-board state: the server's chain plus locally pending edits.
 * Pending edits are pre-validated against the mirrored chain invariants so an
 * illegal gesture is rejected before it ever reaches the wire. */

import type { CardChainDoc, CardEditDoc, EditTarget } from './types';
import { applyEdit, applyEdits, ChainEditError, decodeValues, MIN_GAP } from './validate';

export interface GapView {
  index: number;
  count: number;
  /** removal is disabled once a gap is down to the minimum */
  canRemove: boolean;
}

export interface AnchorView {
  label: string;
  cumulative: number;
  /** decoded position under the cumulative-card rule (display only) */
  value: number;
}

export interface ChainRenderModel {
  domain: [number, number];
  total: number;
  anchors: AnchorView[];
  gaps: GapView[];
  pendingCount: number;
}

export class BoardState {
  private pending: CardEditDoc[] = [];

  constructor(
    private serverChain: CardChainDoc,
    public readonly target?: EditTarget,
  ) {}

  /** Chain with all pending edits applied (what the user currently sees). */
  effectiveChain(): CardChainDoc {
    return applyEdits(this.serverChain, this.pending);
  }

  pendingEdits(): CardEditDoc[] {
    return [...this.pending];
  }

  renderChain(): ChainRenderModel {
    const chain = this.effectiveChain();
    const values = decodeValues(chain);
    return {
      domain: chain.domain,
      total: chain.total,
      anchors: chain.anchors.map((a, i) => ({
        label: a.label,
        cumulative: a.cumulative,
        value: values[i] as number,
      })),
      gaps: chain.gaps.map((count, index) => ({
        index,
        count,
        canRemove: count > MIN_GAP,
      })),
      pendingCount: this.pending.length,
    };
  }

  /** Stage one edit; throws ChainEditError (and stages nothing) if illegal. */
  private stage(edit: CardEditDoc): void {
    applyEdit(this.effectiveChain(), edit);
    this.pending.push(edit);
  }

  /** Drag `count` cards from one gap to another: exactly one move edit. */
  dragCards(fromGap: number, toGap: number, count: number): CardEditDoc {
    const edit: CardEditDoc = {
      kind: 'move',
      gap_index: fromGap,
      count,
      target_gap_index: toGap,
    };
    this.stage(edit);
    return edit;
  }

  /** "+" button: insert blank cards into a gap. */
  insertCards(gap: number, count = 1): CardEditDoc {
    const edit: CardEditDoc = { kind: 'insert', gap_index: gap, count };
    this.stage(edit);
    return edit;
  }

  /** "-" button: remove blank cards from a gap. */
  removeCards(gap: number, count = 1): CardEditDoc {
    const edit: CardEditDoc = { kind: 'remove', gap_index: gap, count };
    this.stage(edit);
    return edit;
  }

  /** A drop on an illegal target: report, stage nothing. */
  canDrop(fromGap: number, toGap: number, count: number): boolean {
    try {
      applyEdit(this.effectiveChain(), {
        kind: 'move',
        gap_index: fromGap,
        count,
        target_gap_index: toGap,
      });
      return true;
    } catch (err) {
      if (err instanceof ChainEditError) return false;
      throw err;
    }
  }

  /** Undo pops the newest pending edit. */
  undo(): CardEditDoc | undefined {
    return this.pending.pop();
  }

  /** Body for POST /v1/sessions/{id}/edits. */
  submissionPayload(): { edits: CardEditDoc[]; target: EditTarget | null } {
    return { edits: this.pendingEdits(), target: this.target ?? null };
  }

  /** Server confirmed: adopt its chain as the new base and clear pending. */
  reconcile(serverChain: CardChainDoc): void {
    this.serverChain = serverChain;
    this.pending = [];
  }
}

/** Card row as an HTML string: labeled anchors with gap counts between them. */
export function chainToHtml(model: ChainRenderModel): string {
  const cells: string[] = [];
  model.anchors.forEach((anchor, i) => {
    cells.push(
      `<span class="anchor" data-label="${anchor.label}" title="${anchor.value.toPrecision(6)}">${anchor.label}</span>`,
    );
    const gap = model.gaps[i];
    if (gap) {
      const disabled = gap.canRemove ? '' : ' data-remove-disabled="true"';
      cells.push(
        `<span class="gap" data-gap-index="${gap.index}"${disabled}>[${gap.count}]</span>`,
      );
    }
  });
  return `<div class="card-chain" data-total="${model.total}">${cells.join(' ')}</div>`;
}
