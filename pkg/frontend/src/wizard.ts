/** Three-stage wizard: propose, edit on the board, commit, repeat.
 * Every number rendered comes from a service response; the wizard only
 * routes payloads between the API client, the boards, and the preview. */

import { ApiClient } from './api';
import { BoardState } from './board';
import { buildPreview, PreviewModel } from './preview';
import type {
  CommitResponse,
  EditTarget,
  RefinementDoc,
  Stage,
  SummaryDoc,
  TranscriptRecord,
} from './types';

export type PanelKind =
  | 'start'
  | 'scale-board'
  | 'core-board'
  | 'side-board'
  | 'review'
  | 'done';

const PANEL_BY_STAGE: Record<Stage, PanelKind> = {
  Created: 'start',
  Step1Proposed: 'scale-board',
  Step1Committed: 'start',
  Step2Proposed: 'core-board',
  Step2Committed: 'review',
  Step3InProgress: 'side-board',
  Finalized: 'done',
};

export class Wizard {
  stage: Stage = 'Created';
  boards: Partial<Record<EditTarget, BoardState>> = {};
  refinement: RefinementDoc | null = null;
  preview: PreviewModel = buildPreview(null, null);
  transcript: TranscriptRecord[] | null = null;
  private summary: SummaryDoc | null = null;

  constructor(
    private api: ApiClient,
    public readonly sessionId: string,
  ) {}

  panel(): PanelKind {
    if (this.stage === 'Step3InProgress' && !this.refinement) return 'review';
    return PANEL_BY_STAGE[this.stage];
  }

  /** Ask the service for the next proposal and stage it on a board. */
  async propose(side?: { classIndex: number; side: 'left' | 'right'; kSide?: number }) {
    const body = side
      ? { class: side.classIndex, side: side.side, k_side: side.kSide ?? 3 }
      : undefined;
    const resp = await this.api.advance(this.sessionId, body);
    this.stage = resp.stage;
    this.boards = {};
    this.refinement = null;
    if (resp.summary) this.summary = resp.summary;
    if (resp.refinement) {
      this.refinement = resp.refinement;
      this.boards.levels = new BoardState(resp.refinement.level_chain, 'levels');
      this.boards.breakpoints = new BoardState(
        resp.refinement.breakpoint_chain,
        'breakpoints',
      );
    } else if (resp.chain) {
      const target: EditTarget = resp.stage === 'Step2Proposed' ? 'step2' : 'step1';
      this.boards[target] = new BoardState(resp.chain, target);
    }
    if (resp.preview_partition) {
      this.preview = buildPreview(resp.preview_partition, this.summary);
    }
    return resp;
  }

  board(target?: EditTarget): BoardState {
    const keys = Object.keys(this.boards) as EditTarget[];
    const key = target ?? (keys.length === 1 ? keys[0] : undefined);
    const board = key ? this.boards[key] : undefined;
    if (!board) {
      throw new Error(`no active board${target ? ` for ${target}` : ''}`);
    }
    return board;
  }

  /** Push one board's pending edits; the server's answer reconciles it. */
  async submitEdits(target?: EditTarget) {
    const board = this.board(target);
    const payload = board.submissionPayload();
    if (payload.edits.length === 0) return;
    const resp = await this.api.applyEdits(
      this.sessionId,
      payload.edits,
      payload.target ?? undefined,
    );
    if (resp.refinement) {
      // level edits re-derive the breakpoint chain server-side
      this.refinement = resp.refinement;
      this.boards.levels?.reconcile(resp.refinement.level_chain);
      this.boards.breakpoints?.reconcile(resp.refinement.breakpoint_chain);
    } else if (resp.chain) {
      board.reconcile(resp.chain);
    }
    return resp;
  }

  /** Commit the staged proposal; the response re-renders the preview. */
  async commit(): Promise<CommitResponse> {
    const resp = await this.api.commit(this.sessionId);
    this.stage = resp.stage;
    this.boards = {};
    this.refinement = null;
    if (resp.partition) {
      this.preview = buildPreview(resp.partition, this.summary);
    }
    if (resp.transcript) {
      this.transcript = resp.transcript;
    }
    return resp;
  }

  /** Finalize offers the transcript as a downloadable JSON document. */
  transcriptDownload(): { filename: string; content: string } | null {
    if (!this.transcript) return null;
    return {
      filename: `session-${this.sessionId}-transcript.json`,
      content: JSON.stringify(this.transcript, null, 2),
    };
  }
}
