/**
 * DOM wiring: a start form, the labelling view (three label buttons plus
 * skip, keyboard shortcuts 1/2/3/s), the offline retry banner, and the
 * adjudication view with gold export. Tweet text only — model scores are
 * never fetched, let alone shown.
 */

import { AdjudicationFlow } from './adjudication.js';
import { AnnotationClient } from './client.js';
import { LabelSession } from './session.js';
import { LABELS, type StanceLabel } from './types.js';

const KEY_TO_LABEL: Record<string, StanceLabel> = {
  '1': 'favor',
  '2': 'against',
  '3': 'neutral',
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function show(id: string, visible: boolean): void {
  el(id).classList.toggle('hidden', !visible);
}

export class App {
  private session: LabelSession | null = null;
  private adjudication: AdjudicationFlow | null = null;

  constructor(private readonly client: AnnotationClient) {}

  start(): void {
    el<HTMLFormElement>('start-form').addEventListener('submit', (event) => {
      event.preventDefault();
      const taskId = el<HTMLInputElement>('task-id').value.trim();
      const annotator = el<HTMLInputElement>('annotator-id').value.trim();
      if (taskId && annotator) void this.openSession(taskId, annotator);
    });
    for (const label of LABELS) {
      el(`label-${label}`).addEventListener('click', () => void this.submit(label));
    }
    el('skip-button').addEventListener('click', () => void this.skip());
    el('retry-button').addEventListener('click', () => void this.retry());
    el('to-adjudication').addEventListener('click', () => void this.openAdjudication());
    el('export-gold').addEventListener('click', () => void this.exportGold());
    document.addEventListener('keydown', (event) => {
      if (this.session?.status !== 'ready') return;
      const label = KEY_TO_LABEL[event.key];
      if (label) void this.submit(label);
      if (event.key === 's') void this.skip();
    });
  }

  private async openSession(taskId: string, annotator: string): Promise<void> {
    this.session = new LabelSession(this.client, taskId, annotator);
    show('start-view', false);
    show('label-view', true);
    await this.session.advance();
    this.renderSession();
  }

  private async submit(label: StanceLabel): Promise<void> {
    if (!this.session) return;
    await this.session.submit(label);
    this.renderSession();
  }

  private async skip(): Promise<void> {
    if (!this.session) return;
    await this.session.skip();
    this.renderSession();
  }

  private async retry(): Promise<void> {
    if (!this.session) return;
    await this.session.retry();
    this.renderSession();
  }

  private renderSession(): void {
    const session = this.session;
    if (!session) return;
    show('offline-banner', session.offline);
    show('error-line', Boolean(session.lastError) && !session.offline);
    if (session.lastError && !session.offline) {
      el('error-line').textContent = session.lastError;
    }
    const counts = session.counts;
    if (counts) {
      el('counts').textContent =
        `labelled ${counts.labelled ?? 0} / ${counts.total}` +
        ` · open disagreements ${counts.unresolved_disagreements}`;
    }
    if (session.status === 'done') {
      el('tweet-text').textContent = 'Klaar: alle tweets zijn gelabeld.';
      show('label-buttons', false);
      return;
    }
    if (session.current) {
      el('tweet-text').textContent = session.current.text;
      show('label-buttons', true);
    }
  }

  private async openAdjudication(): Promise<void> {
    const taskId =
      this.session?.taskId ?? el<HTMLInputElement>('task-id').value.trim();
    if (!taskId) return;
    this.adjudication = new AdjudicationFlow(this.client, taskId);
    show('start-view', false);
    show('label-view', false);
    show('adjudication-view', true);
    await this.adjudication.load();
    await this.renderAdjudication();
  }

  private async renderAdjudication(): Promise<void> {
    const flow = this.adjudication;
    if (!flow) return;
    const list = el('disagreement-list');
    list.replaceChildren();
    if (flow.empty) {
      const empty = document.createElement('p');
      empty.textContent = 'Geen openstaande meningsverschillen.';
      list.appendChild(empty);
    }
    for (const item of flow.items) {
      const row = document.createElement('div');
      row.className = 'disagreement';
      const text = document.createElement('p');
      text.textContent = item.text;
      row.appendChild(text);
      const labels = document.createElement('p');
      labels.className = 'labels';
      labels.textContent = Object.entries(item.labels)
        .map(([who, label]) => `${who}: ${label}`)
        .join('  ·  ');
      row.appendChild(labels);
      for (const label of LABELS) {
        const button = document.createElement('button');
        button.textContent = label;
        button.addEventListener('click', () => {
          void flow.resolve(item.tweet_id, label).then(() => this.renderAdjudication());
        });
        row.appendChild(button);
      }
      list.appendChild(row);
    }
    const ready = await flow.exportReady();
    el<HTMLButtonElement>('export-gold').disabled = !ready;
  }

  private async exportGold(): Promise<void> {
    if (!this.adjudication) return;
    const gold = await this.adjudication.gold();
    const blob = new Blob([JSON.stringify(gold, null, 2)], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = `${this.adjudication.taskId}_gold.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  }
}

if (typeof document !== 'undefined' && document.getElementById('start-form')) {
  new App(new AnnotationClient('')).start();
}
