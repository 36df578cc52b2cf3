import { readFileSync, readdirSync } from 'node:fs';
import path from 'node:path';

import type { FetchLike } from '../src/api/client';
import type {
  AnswerOption,
  CasePanel,
  SessionPayload,
  Step,
} from '../src/api/schemas';

// vitest runs with the package root as its working directory.
const FIXTURES_DIR = path.join(process.cwd(), 'tests', 'fixtures');

/** One recorded HTTP exchange: status code plus decoded JSON body. */
export interface Recorded {
  status: number;
  body: unknown;
}

export function loadFixture(name: string): Recorded {
  const raw = readFileSync(path.join(FIXTURES_DIR, `${name}.json`), 'utf8');
  return JSON.parse(raw) as Recorded;
}

export function fixtureNames(): string[] {
  return readdirSync(FIXTURES_DIR)
    .filter((entry) => entry.endsWith('.json'))
    .map((entry) => entry.slice(0, -'.json'.length))
    .sort();
}

export function jsonResponse(recorded: Recorded): Response {
  return new Response(JSON.stringify(recorded.body), {
    status: recorded.status,
    headers: { 'content-type': 'application/json' },
  });
}

type QueueEntry = Recorded | { raw: Response } | { reject: Error };

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
  headers: Record<string, string> | undefined;
}

/** Queue-based fetch stub: answers calls in order, records what was sent. */
export class FakeFetch {
  readonly calls: RecordedCall[] = [];
  private readonly queue: QueueEntry[] = [];

  enqueue(...entries: QueueEntry[]): void {
    this.queue.push(...entries);
  }

  readonly fn: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const body = typeof init?.body === 'string' ? JSON.parse(init.body) : undefined;
    this.calls.push({
      url, method, body,
      headers: init?.headers as Record<string, string> | undefined,
    });
    const next = this.queue.shift();
    if (!next) {
      throw new Error(`no scripted response for ${method} ${url}`);
    }
    if ('reject' in next) throw next.reject;
    if ('raw' in next) return next.raw;
    return jsonResponse(next);
  };
}

export interface ScriptStep {
  method: string;
  path: string;
  response: Recorded;
  checkBody?: (body: unknown) => void;
}

/**
 * Strict fetch stub for flow tests: every request must match the next step
 * of the script, so the test fails on any unexpected or missing call.
 */
export class ScriptedFetch {
  private readonly remaining: ScriptStep[];

  constructor(script: ScriptStep[]) {
    this.remaining = [...script];
  }

  readonly fn: FetchLike = async (url, init) => {
    const method = init?.method ?? 'GET';
    const step = this.remaining.shift();
    if (!step) {
      throw new Error(`unexpected request ${method} ${url}`);
    }
    if (step.method !== method || step.path !== url) {
      throw new Error(
        `expected ${step.method} ${step.path}, got ${method} ${url}`);
    }
    if (step.checkBody) {
      step.checkBody(typeof init?.body === 'string' ? JSON.parse(init.body) : undefined);
    }
    return jsonResponse(step.response);
  };

  assertDone(): void {
    if (this.remaining.length > 0) {
      const next = this.remaining[0];
      throw new Error(
        `script not fully consumed; next expected ${next.method} ${next.path}`);
    }
  }
}

// --- payload builders for synthetic session flows -------------------------

export const YES_NO: AnswerOption[] = [
  { id: 'yes', label: 'Yes' },
  { id: 'no', label: 'No' },
];

export function casePanel(caseId: string, date: string, summary = 'Summary.'): CasePanel {
  return {
    case_id: caseId,
    citation: `Tribunal file ${caseId}`,
    decision_date: date,
    summary,
  };
}

export function stepOf(index: number, criterionId: string, answerId: string): Step {
  return {
    index,
    criterion_id: criterionId,
    criterion_title: `Question about ${criterionId}`,
    answer_id: answerId,
    answer_label: answerId === 'yes' ? 'Yes' : answerId === 'no' ? 'No' : answerId,
  };
}

interface PromptOptions {
  sessionId?: string;
  steps?: Step[];
  criterionId: string;
  title?: string;
  answers?: AnswerOption[];
  applied?: CasePanel[];
  notApplied?: CasePanel[];
}

export function promptPayload(options: PromptOptions): SessionPayload {
  return {
    session_id: options.sessionId ?? 'sess-1',
    status: 'IN_PROGRESS',
    schema_id: 'flow-test',
    schema_version: '1.0.0',
    steps: options.steps ?? [],
    view: {
      type: 'prompt',
      criterion_id: options.criterionId,
      title: options.title ?? `Question about ${options.criterionId}`,
      description: '',
      answers: options.answers ?? YES_NO,
      applied_examples: options.applied ?? [],
      not_applied_examples: options.notApplied ?? [],
    },
  };
}

interface AnalysisOptions {
  sessionId?: string;
  steps: Step[];
  conclusions?: { conclusion_id: string; title: string; explanation: string }[];
  matchedCases?: (CasePanel & { conclusion_id: string })[];
  nextSteps?: { title: string; text: string }[];
}

export function analysisPayload(options: AnalysisOptions): SessionPayload {
  return {
    session_id: options.sessionId ?? 'sess-1',
    status: 'COMPLETE',
    schema_id: 'flow-test',
    schema_version: '1.0.0',
    steps: options.steps,
    view: {
      type: 'analysis',
      past_outcomes_only: true,
      conclusions: options.conclusions ?? [{
        conclusion_id: 'outcome',
        title: 'A plausible outcome',
        explanation: 'Past decisions in matching situations reached this.',
      }],
      matched_cases: options.matchedCases ?? [],
      next_steps: options.nextSteps ?? [],
    },
  };
}

export const BUNDLE_INFO = {
  title: 'Flow test pathways',
  locale: 'en-CA',
  published_date: '2024-01-01',
  schema_id: 'flow-test',
  schema_version: '1.0.0',
  block_count: 4,
};

export function errorBody(code: string, message = 'refused'): Recorded['body'] {
  return { error: { code, message } };
}
