import { ApiClient, ApiError } from './api/client';
import type { AnswerOption, BundleInfo, SessionPayload } from './api/schemas';
import { Store } from './state/store';

export type Phase = 'disclaimer' | 'loading' | 'interview' | 'review' | 'fatal';

export interface AppState {
  phase: Phase;
  bundle: BundleInfo | null;
  session: SessionPayload | null;
  /** Recoverable problem worth telling the user about, or null. */
  banner: string | null;
  fatalMessage: string | null;
  feedbackSent: boolean;
  busy: boolean;
}

export const initialState: AppState = {
  phase: 'disclaimer',
  bundle: null,
  session: null,
  banner: null,
  fatalMessage: null,
  feedbackSent: false,
  busy: false,
};

export interface FeedbackForm {
  issueText: string;
  foundHelpful: boolean | null;
  understoodRights: boolean | null;
  wouldRecommend: boolean | null;
}

/** Errors the user can act on from where they already are. */
const RECOVERABLE_CODES = new Set([
  'UNKNOWN_ANSWER',
  'SESSION_COMPLETE',
  'SESSION_INCOMPLETE',
  'BAD_INDEX',
  'VALIDATION',
]);

export function classifyReferrer(referrer: string): string {
  return referrer === '' ? 'direct' : 'external';
}

/**
 * Application controller. Owns all talking to the service and all state
 * transitions; the DOM layer is a pure function of the resulting state.
 * No legal logic lives here: questions, ordering, example selection and
 * conclusions all come from the service verbatim.
 */
export class App {
  readonly store: Store<AppState>;
  private readonly api: ApiClient;
  // Answer options for every question this session has shown, so the review
  // screen can offer alternatives without asking the server again.
  private readonly answerOptions = new Map<string, AnswerOption[]>();

  constructor(api: ApiClient, store: Store<AppState> = new Store(initialState)) {
    this.api = api;
    this.store = store;
  }

  /** The disclaimer was read and accepted: load the bundle, open a session. */
  async acceptDisclaimer(referrerClass?: string): Promise<void> {
    this.store.update({ phase: 'loading', banner: null });
    try {
      const bundle = await this.api.bundle();
      const session = await this.api.createSession(referrerClass);
      this.answerOptions.clear();
      this.rememberPrompt(session);
      this.store.update({
        phase: 'interview', bundle, session, busy: false, feedbackSent: false,
      });
    } catch (exc) {
      await this.fail(exc);
    }
  }

  async chooseAnswer(answerId: string): Promise<void> {
    const session = this.store.get().session;
    if (!session || this.store.get().busy) return;
    await this.mutateSession(() => this.api.postAnswer(session.session_id, answerId));
  }

  openReview(): void {
    if (!this.store.get().session) return;
    this.store.update({ phase: 'review', banner: null });
  }

  closeReview(): void {
    if (!this.store.get().session) return;
    this.store.update({ phase: 'interview', banner: null });
  }

  /** Answer options recorded for a question, or null if never shown. */
  optionsFor(criterionId: string): AnswerOption[] | null {
    return this.answerOptions.get(criterionId) ?? null;
  }

  async reviseAnswer(stepIndex: number, answerId: string): Promise<void> {
    const session = this.store.get().session;
    if (!session || this.store.get().busy) return;
    await this.mutateSession(
      () => this.api.reviseAnswer(session.session_id, stepIndex, answerId));
  }

  /**
   * Re-pose the question at stepIndex when its options are unknown. Revising
   * the previous step with its own answer truncates everything after it, so
   * the interview lands back on exactly that question. The first question has
   * no previous step; start a fresh session instead.
   */
  async reopenStep(stepIndex: number): Promise<void> {
    const session = this.store.get().session;
    if (!session || this.store.get().busy) return;
    if (stepIndex <= 0) {
      await this.restart();
      return;
    }
    const prior = session.steps[stepIndex - 1];
    if (!prior) return;
    await this.mutateSession(
      () => this.api.reviseAnswer(session.session_id, prior.index, prior.answer_id));
  }

  /** Throw away the current session and begin again at the first question. */
  async restart(): Promise<void> {
    this.store.update({ phase: 'loading', banner: null, busy: false });
    try {
      const session = await this.api.createSession();
      this.answerOptions.clear();
      this.rememberPrompt(session);
      this.store.update({
        phase: 'interview', session, busy: false, feedbackSent: false,
      });
    } catch (exc) {
      await this.fail(exc);
    }
  }

  async submitFeedback(form: FeedbackForm): Promise<void> {
    const session = this.store.get().session;
    if (!session || this.store.get().busy) return;
    this.store.update({ busy: true, banner: null });
    try {
      await this.api.postFeedback({
        session_id: session.session_id,
        issue_text: form.issueText,
        found_helpful: form.foundHelpful,
        understood_rights: form.understoodRights,
        would_recommend: form.wouldRecommend,
      });
      this.store.update({ feedbackSent: true, busy: false });
    } catch (exc) {
      await this.fail(exc);
    }
  }

  private async mutateSession(call: () => Promise<SessionPayload>): Promise<void> {
    this.store.update({ busy: true, banner: null });
    try {
      const session = await call();
      this.rememberPrompt(session);
      this.store.update({ phase: 'interview', session, busy: false });
    } catch (exc) {
      await this.fail(exc);
    }
  }

  private rememberPrompt(session: SessionPayload): void {
    if (session.view.type === 'prompt') {
      this.answerOptions.set(session.view.criterion_id, session.view.answers);
    }
  }

  private async fail(exc: unknown): Promise<void> {
    if (exc instanceof ApiError) {
      if (exc.code === 'UNKNOWN_SESSION') {
        // Expired or evicted on the server; nothing to resume.
        this.store.update({
          phase: 'disclaimer', session: null, busy: false, feedbackSent: false,
          banner: 'Your session has expired. Please start again.',
        });
        return;
      }
      if (RECOVERABLE_CODES.has(exc.code)) {
        await this.recoverSession(exc.message);
        return;
      }
    }
    const message = exc instanceof Error ? exc.message : String(exc);
    this.store.update({ phase: 'fatal', fatalMessage: message, busy: false });
  }

  /**
   * After a refused mutation the local copy may be stale (for example, a
   * second click on the final answer). Refetch so the banner sits on top of
   * what the server actually believes.
   */
  private async recoverSession(message: string): Promise<void> {
    const session = this.store.get().session;
    if (!session) {
      this.store.update({ busy: false, banner: message });
      return;
    }
    try {
      const fresh = await this.api.getSession(session.session_id);
      this.rememberPrompt(fresh);
      this.store.update({
        phase: 'interview', session: fresh, busy: false, banner: message,
      });
    } catch (refetchExc) {
      const detail = refetchExc instanceof Error ? refetchExc.message : String(refetchExc);
      this.store.update({ phase: 'fatal', fatalMessage: detail, busy: false });
    }
  }
}
