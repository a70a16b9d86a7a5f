/**
 * Labelling session state machine for one annotator.
 *
 * The server is the single source of truth: every displayed count comes
 * from the latest server response, and the session never advances past a
 * submission the server has not acknowledged. A failed transport keeps the
 * pending submission for retry; a server rejection surfaces inline.
 */

import { ApiError, NetworkError, type AnnotationClient } from './client.js';
import type { Counts, StanceLabel } from './types.js';

export type SessionStatus = 'loading' | 'ready' | 'submitting' | 'offline' | 'done';

export interface CurrentTweet {
  tweetId: string;
  text: string;
  position: number;
}

export class LabelSession {
  status: SessionStatus = 'loading';
  current: CurrentTweet | null = null;
  counts: Counts | null = null;
  lastError: string | null = null;

  private skipped: string[] = [];
  private pending: { tweetId: string; label: StanceLabel } | null = null;

  constructor(
    private readonly client: AnnotationClient,
    readonly taskId: string,
    readonly annotatorId: string,
  ) {}

  /** Fetch the next tweet to label (skipped ones come back last). */
  async advance(): Promise<void> {
    this.status = 'loading';
    try {
      const item = await this.client.next(this.taskId, this.annotatorId, this.skipped);
      this.counts = item.counts;
      if (item.done) {
        this.current = null;
        this.status = 'done';
        return;
      }
      this.current = {
        tweetId: item.tweet_id!,
        text: item.text!,
        position: item.position!,
      };
      // once only skipped tweets remain the server serves them again
      if (this.skipped.length > 0 && this.skipped[0] === this.current.tweetId) {
        this.skipped.shift();
      }
      this.status = 'ready';
      this.lastError = null;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.status = err instanceof NetworkError ? 'offline' : 'ready';
    }
  }

  /** Defer the current tweet to the end of the queue. */
  async skip(): Promise<void> {
    if (!this.current) return;
    if (!this.skipped.includes(this.current.tweetId)) {
      this.skipped.push(this.current.tweetId);
    }
    await this.advance();
  }

  /** Submit a label for the current tweet; advances only on server ack. */
  async submit(label: StanceLabel): Promise<void> {
    if (!this.current) return;
    this.pending = { tweetId: this.current.tweetId, label };
    await this.flush();
  }

  /** Retry the stored submission after a transport failure. */
  async retry(): Promise<void> {
    if (this.pending) {
      await this.flush();
    } else {
      await this.advance();
    }
  }

  get offline(): boolean {
    return this.status === 'offline';
  }

  private async flush(): Promise<void> {
    if (!this.pending) return;
    this.status = 'submitting';
    const { tweetId, label } = this.pending;
    try {
      await this.client.submitLabel(this.taskId, this.annotatorId, tweetId, label);
      this.pending = null;
      this.lastError = null;
      await this.advance();
    } catch (err) {
      if (err instanceof NetworkError) {
        // keep the pending submission; nothing was lost
        this.status = 'offline';
        this.lastError = err.message;
      } else if (err instanceof ApiError) {
        this.pending = null;
        this.status = 'ready';
        this.lastError = err.message;
      } else {
        throw err;
      }
    }
  }
}
