/**
 * Joint adjudication flow: both annotators' labels side by side, one final
 * label per disagreement. Resolved items leave the list; the gold export
 * unlocks once nothing is pending.
 */

import { NetworkError, type AnnotationClient } from './client.js';
import type { Disagreement, GoldResponse, StanceLabel } from './types.js';

export class AdjudicationFlow {
  items: Disagreement[] = [];
  lastError: string | null = null;

  constructor(
    private readonly client: AnnotationClient,
    readonly taskId: string,
  ) {}

  async load(): Promise<void> {
    this.items = await this.client.disagreements(this.taskId, true);
  }

  get empty(): boolean {
    return this.items.length === 0;
  }

  async resolve(tweetId: string, finalLabel: StanceLabel): Promise<boolean> {
    try {
      await this.client.adjudicate(this.taskId, tweetId, finalLabel);
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      if (!(err instanceof NetworkError)) {
        // stale view (already resolved elsewhere): refresh to server truth
        await this.load();
      }
      return false;
    }
    this.lastError = null;
    await this.load();
    return true;
  }

  /** Gold export is meaningful once every tweet is agreed or adjudicated. */
  async exportReady(): Promise<boolean> {
    const gold = await this.client.gold(this.taskId);
    return gold.pending.length === 0;
  }

  gold(): Promise<GoldResponse> {
    return this.client.gold(this.taskId);
  }
}
