/**
 * Typed client for the annotation HTTP API.
 *
 * Server rejections (4xx/5xx) become ApiError with the server's detail
 * message; transport failures become NetworkError so callers can offer a
 * retry instead of dropping the submission.
 */

import type {
  Disagreement,
  GoldResponse,
  NextItem,
  StanceLabel,
  TaskSummary,
  TweetStatus,
} from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'NetworkError';
  }
}

type FetchLike = typeof fetch;

export class AnnotationClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = '', fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/$/, '');
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.base}${path}`, init);
    } catch (err) {
      throw new NetworkError(err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  health(): Promise<{ status: string; tasks: string[] }> {
    return this.request('/health');
  }

  taskSummary(taskId: string, annotator?: string): Promise<TaskSummary> {
    const query = annotator ? `?annotator=${encodeURIComponent(annotator)}` : '';
    return this.request(`/tasks/${encodeURIComponent(taskId)}${query}`);
  }

  next(taskId: string, annotator: string, skip: string[] = []): Promise<NextItem> {
    const params = new URLSearchParams({ annotator });
    if (skip.length > 0) params.set('skip', skip.join(','));
    return this.request(`/tasks/${encodeURIComponent(taskId)}/next?${params}`);
  }

  submitLabel(
    taskId: string,
    annotatorId: string,
    tweetId: string,
    label: StanceLabel,
  ): Promise<{ status: string; tweet: TweetStatus }> {
    return this.post(`/tasks/${encodeURIComponent(taskId)}/labels`, {
      annotator_id: annotatorId,
      tweet_id: tweetId,
      label,
    });
  }

  disagreements(taskId: string, unresolvedOnly = false): Promise<Disagreement[]> {
    const query = unresolvedOnly ? '?unresolved_only=true' : '';
    return this.request<{ disagreements: Disagreement[] }>(
      `/tasks/${encodeURIComponent(taskId)}/disagreements${query}`,
    ).then((body) => body.disagreements);
  }

  adjudicate(
    taskId: string,
    tweetId: string,
    finalLabel: StanceLabel,
  ): Promise<{ tweet_id: string; final_label: StanceLabel; resolved_by: string[] }> {
    return this.post(`/tasks/${encodeURIComponent(taskId)}/adjudications`, {
      tweet_id: tweetId,
      final_label: finalLabel,
    });
  }

  gold(taskId: string): Promise<GoldResponse> {
    return this.request(`/tasks/${encodeURIComponent(taskId)}/gold`);
  }
}
