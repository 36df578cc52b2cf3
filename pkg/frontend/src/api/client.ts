import { z } from 'zod';

import {
  BundleInfoSchema,
  ErrorEnvelopeSchema,
  EventAcceptedSchema,
  FeedbackRecordedSchema,
  FeedbackStatsSchema,
  HealthSchema,
  PathwayStatsSchema,
  SessionPayloadSchema,
} from './schemas';
import type {
  BundleInfo,
  FeedbackStats,
  Health,
  PathwayStats,
  SessionPayload,
} from './schemas';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** The service refused the request and said why (error envelope). */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = 'ApiError';
    this.code = code;
    this.status = status;
  }
}

/**
 * The response did not look like the service at all: network failure,
 * non-JSON body, or JSON that violates the documented payload shapes.
 */
export class ContractError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'ContractError';
  }
}

export interface FeedbackSubmission {
  session_id: string;
  issue_text?: string;
  found_helpful?: boolean | null;
  understood_rights?: boolean | null;
  would_recommend?: boolean | null;
}

/**
 * Thin typed wrapper over the HTTP API. Every response passes through a zod
 * schema, so callers only ever see values that match the contract. The fetch
 * implementation is injected to keep tests hermetic.
 */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = '', fetchFn: FetchLike = (input, init) => fetch(input, init)) {
    this.base = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn;
  }

  health(): Promise<Health> {
    return this.request(HealthSchema, 'GET', '/api/v1/health');
  }

  bundle(): Promise<BundleInfo> {
    return this.request(BundleInfoSchema, 'GET', '/api/v1/bundle');
  }

  createSession(referrerClass?: string): Promise<SessionPayload> {
    const body = referrerClass === undefined ? {} : { referrer_class: referrerClass };
    return this.request(SessionPayloadSchema, 'POST', '/api/v1/sessions', body);
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request(
      SessionPayloadSchema, 'GET',
      `/api/v1/sessions/${encodeURIComponent(sessionId)}`);
  }

  postAnswer(sessionId: string, answerId: string): Promise<SessionPayload> {
    return this.request(
      SessionPayloadSchema, 'POST',
      `/api/v1/sessions/${encodeURIComponent(sessionId)}/answers`,
      { answer_id: answerId });
  }

  reviseAnswer(sessionId: string, stepIndex: number, answerId: string): Promise<SessionPayload> {
    return this.request(
      SessionPayloadSchema, 'PATCH',
      `/api/v1/sessions/${encodeURIComponent(sessionId)}/answers/${stepIndex}`,
      { answer_id: answerId });
  }

  postEvent(kind: string, sessionId: string | null,
            payload: Record<string, string> = {}): Promise<{ accepted: true }> {
    return this.request(EventAcceptedSchema, 'POST', '/api/v1/events',
      { kind, session_id: sessionId, payload });
  }

  postFeedback(feedback: FeedbackSubmission): Promise<{ recorded: true }> {
    return this.request(FeedbackRecordedSchema, 'POST', '/api/v1/feedback', feedback);
  }

  pathwayStats(from?: string, to?: string): Promise<PathwayStats> {
    return this.request(PathwayStatsSchema, 'GET',
      '/api/v1/stats/pathways' + windowQuery(from, to));
  }

  feedbackStats(from?: string, to?: string): Promise<FeedbackStats> {
    return this.request(FeedbackStatsSchema, 'GET',
      '/api/v1/stats/feedback' + windowQuery(from, to));
  }

  private async request<S extends z.ZodType>(
    schema: S, method: string, path: string, body?: unknown,
  ): Promise<z.infer<S>> {
    const url = this.base + path;
    let response: Response;
    try {
      response = await this.fetchFn(url, {
        method,
        headers: body === undefined ? undefined : { 'content-type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (exc) {
      throw new ContractError(`network failure for ${method} ${path}: ${String(exc)}`);
    }

    let parsed: unknown;
    try {
      parsed = await response.json();
    } catch {
      throw new ContractError(
        `non-JSON response (status ${response.status}) for ${method} ${path}`);
    }

    if (!response.ok) {
      const envelope = ErrorEnvelopeSchema.safeParse(parsed);
      if (!envelope.success) {
        throw new ContractError(
          `malformed error envelope (status ${response.status}) for ${method} ${path}`);
      }
      throw new ApiError(envelope.data.error.code, envelope.data.error.message,
        response.status);
    }

    const result = schema.safeParse(parsed);
    if (!result.success) {
      throw new ContractError(
        `response for ${method} ${path} violates the API contract: `
        + z.prettifyError(result.error));
    }
    return result.data;
  }
}

function windowQuery(from?: string, to?: string): string {
  const params = new URLSearchParams();
  if (from !== undefined) params.set('from', from);
  if (to !== undefined) params.set('to', to);
  const text = params.toString();
  return text ? `?${text}` : '';
}
