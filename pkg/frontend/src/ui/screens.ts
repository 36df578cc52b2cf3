import type {
  AnalysisView,
  AnswerOption,
  CasePanel,
  PromptView,
  Step,
} from '../api/schemas';
import type { App, AppState, FeedbackForm } from '../app';
import { classifyReferrer } from '../app';
import { el } from './dom';

// Screens are pure functions from state to DOM. The whole tree is rebuilt on
// every store change; at this scale that is simpler and safer than diffing.

export function renderApp(state: AppState, app: App): HTMLElement {
  const main = el('main', { className: 'app' });
  main.append(renderHeader(state));
  if (state.banner) {
    main.append(el('div', {
      className: 'banner', text: state.banner, attrs: { role: 'alert' },
    }));
  }
  switch (state.phase) {
    case 'disclaimer':
      main.append(renderDisclaimer(() => {
        void app.acceptDisclaimer(classifyReferrer(document.referrer));
      }));
      break;
    case 'loading':
      main.append(el('p', { className: 'loading', text: 'Loading…' }));
      break;
    case 'interview': {
      const session = state.session;
      if (!session) {
        main.append(renderFatal('No active session.', () => { void app.restart(); }));
        break;
      }
      if (session.view.type === 'prompt') {
        main.append(renderPrompt(session.view, session.steps.length, state.busy, {
          onAnswer: (id) => { void app.chooseAnswer(id); },
          onReview: session.steps.length > 0 ? () => app.openReview() : null,
        }));
      } else {
        main.append(renderAnalysis(session.view, state.busy, state.feedbackSent, {
          onReview: () => app.openReview(),
          onRestart: () => { void app.restart(); },
          onFeedback: (form) => { void app.submitFeedback(form); },
        }));
      }
      break;
    }
    case 'review': {
      const session = state.session;
      if (!session) {
        main.append(renderFatal('No active session.', () => { void app.restart(); }));
        break;
      }
      main.append(renderReview(
        session.steps, (cid) => app.optionsFor(cid), state.busy, {
          onRevise: (step, answer) => { void app.reviseAnswer(step, answer); },
          onReopen: (step) => { void app.reopenStep(step); },
          onBack: () => app.closeReview(),
        }));
      break;
    }
    case 'fatal':
      main.append(renderFatal(
        state.fatalMessage ?? 'Something went wrong.',
        () => { void app.restart(); }));
      break;
  }
  return main;
}

function renderHeader(state: AppState): HTMLElement {
  const title = state.bundle ? state.bundle.title : 'Guided legal information';
  return el('header', { className: 'masthead' }, [
    el('h1', { text: title }),
    el('p', {
      className: 'tagline',
      text: 'Information based on legislation and past tribunal decisions. '
        + 'Not legal advice.',
    }),
  ]);
}

export function renderDisclaimer(onAccept: () => void): HTMLElement {
  const points = [
    'This tool provides general legal information based on legislation and '
    + 'past tribunal decisions. It does not provide legal advice.',
    'Examples of past decisions describe other people\'s situations. A '
    + 'situation that looks similar can still lead to a different outcome.',
    'No outcome is guaranteed. For advice about your own situation, consult '
    + 'a lawyer or a legal aid service.',
    'Your answers are used only to guide this session and for anonymous '
    + 'usage statistics.',
  ];
  const checkbox = el('input', {
    attrs: { type: 'checkbox', id: 'accept-check' },
  });
  const start = el('button', {
    className: 'primary', text: 'Start', attrs: { disabled: '' },
    onClick: () => onAccept(),
  });
  checkbox.addEventListener('change', () => {
    start.disabled = !checkbox.checked;
  });
  return el('section', { className: 'screen disclaimer' }, [
    el('h2', { text: 'Before you start' }),
    el('ul', {}, points.map((text) => el('li', { text }))),
    el('label', { className: 'accept', attrs: { for: 'accept-check' } }, [
      checkbox,
      ' I understand that this is general information, not legal advice.',
    ]),
    start,
  ]);
}

interface PromptHandlers {
  onAnswer: (answerId: string) => void;
  onReview: (() => void) | null;
}

export function renderPrompt(view: PromptView, answeredCount: number,
                             busy: boolean, handlers: PromptHandlers): HTMLElement {
  const section = el('section', { className: 'screen prompt' }, [
    el('p', { className: 'progress', text: `Question ${answeredCount + 1}` }),
    el('h2', { text: view.title }),
  ]);
  if (view.description) {
    section.append(el('p', { className: 'description', text: view.description }));
  }
  section.append(el('div', { className: 'answers' }, view.answers.map(
    (answer) => answerButton(answer, busy, handlers.onAnswer))));
  if (view.applied_examples.length > 0 || view.not_applied_examples.length > 0) {
    // The service already limits each list to its five most recent cases;
    // render exactly what it sent.
    section.append(el('div', { className: 'examples' }, [
      exampleColumn('Past decisions where this applied',
        view.applied_examples, 'applied'),
      exampleColumn('Past decisions where this did not apply',
        view.not_applied_examples, 'not-applied'),
    ]));
  }
  if (handlers.onReview) {
    section.append(el('button', {
      className: 'link review-link', text: 'Review your answers',
      onClick: handlers.onReview,
    }));
  }
  return section;
}

function answerButton(answer: AnswerOption, busy: boolean,
                      onAnswer: (id: string) => void): HTMLElement {
  const button = el('button', {
    className: 'answer', text: answer.label,
    attrs: { 'data-answer-id': answer.id },
    onClick: () => onAnswer(answer.id),
  });
  if (busy) button.disabled = true;
  return button;
}

function exampleColumn(heading: string, cases: CasePanel[],
                       flavour: string): HTMLElement {
  const column = el('div', { className: `example-column ${flavour}` }, [
    el('h3', { text: heading }),
  ]);
  if (cases.length === 0) {
    column.append(el('p', { className: 'empty', text: 'No recorded examples.' }));
    return column;
  }
  for (const item of cases) {
    column.append(caseCard(item));
  }
  return column;
}

function caseCard(item: CasePanel): HTMLElement {
  return el('article', {
    className: 'case-card', attrs: { 'data-case-id': item.case_id },
  }, [
    el('p', { className: 'case-meta' }, [
      el('strong', { text: item.citation }),
      el('span', { className: 'case-date', text: ` (decided ${item.decision_date})` }),
    ]),
    el('p', { className: 'case-summary', text: item.summary }),
  ]);
}

interface AnalysisHandlers {
  onReview: () => void;
  onRestart: () => void;
  onFeedback: (form: FeedbackForm) => void;
}

export function renderAnalysis(view: AnalysisView, busy: boolean,
                               feedbackSent: boolean,
                               handlers: AnalysisHandlers): HTMLElement {
  const section = el('section', { className: 'screen analysis' }, [
    el('h2', { text: 'What past decisions suggest' }),
    el('p', {
      className: 'analysis-note',
      text: 'These conclusions describe how tribunals decided past situations '
        + 'that match your answers. They are general information, not legal '
        + 'advice, and do not guarantee any outcome in your case.',
    }),
  ]);
  for (const conclusion of view.conclusions) {
    section.append(el('article', {
      className: 'conclusion', attrs: { 'data-conclusion-id': conclusion.conclusion_id },
    }, [
      el('h3', { text: conclusion.title }),
      el('p', { text: conclusion.explanation }),
    ]));
  }
  if (view.matched_cases.length > 0) {
    section.append(renderMatchedCases(view));
  }
  if (view.next_steps.length > 0) {
    section.append(el('h3', { text: 'What you can do next' }));
    section.append(el('ol', { className: 'next-steps' }, view.next_steps.map(
      (step) => el('li', {}, [
        el('strong', { text: step.title }),
        el('p', { text: step.text }),
      ]))));
  }
  section.append(el('div', { className: 'actions' }, [
    el('button', {
      className: 'link review-link', text: 'Review your answers',
      onClick: handlers.onReview,
    }),
    el('button', {
      className: 'link restart-link', text: 'Start over',
      onClick: handlers.onRestart,
    }),
  ]));
  section.append(feedbackSent
    ? el('p', { className: 'feedback-thanks', text: 'Thank you for your feedback.' })
    : renderFeedbackForm(busy, handlers.onFeedback));
  return section;
}

function renderMatchedCases(view: AnalysisView): HTMLElement {
  // Grouping by conclusion is presentation only; membership comes from the
  // conclusion_id the service put on each case.
  const byConclusion = new Map<string, CasePanel[]>();
  for (const matched of view.matched_cases) {
    const group = byConclusion.get(matched.conclusion_id) ?? [];
    group.push(matched);
    byConclusion.set(matched.conclusion_id, group);
  }
  const container = el('div', { className: 'matched-cases' }, [
    el('h3', { text: 'Past decisions similar to your situation' }),
  ]);
  const seen = new Set<string>();
  for (const conclusion of view.conclusions) {
    const group = byConclusion.get(conclusion.conclusion_id);
    seen.add(conclusion.conclusion_id);
    if (!group) continue;
    container.append(el('h4', { text: conclusion.title }));
    for (const item of group) {
      container.append(caseCard(item));
    }
  }
  for (const [conclusionId, group] of byConclusion) {
    if (seen.has(conclusionId)) continue;
    container.append(el('h4', { text: 'Other past decisions' }));
    for (const item of group) {
      container.append(caseCard(item));
    }
  }
  return container;
}

const SURVEY_QUESTIONS: [string, string][] = [
  ['found_helpful', 'Did you find this tool helpful?'],
  ['understood_rights', 'Do you understand your rights and options better?'],
  ['would_recommend', 'Would you recommend this tool to someone in a similar situation?'],
];

function renderFeedbackForm(busy: boolean,
                            onFeedback: (form: FeedbackForm) => void): HTMLElement {
  const container = el('div', { className: 'feedback-form' }, [
    el('h3', { text: 'Was this helpful?' }),
  ]);
  for (const [name, label] of SURVEY_QUESTIONS) {
    const select = el('select', { attrs: { 'data-q': name } }, [
      el('option', { text: 'No answer', attrs: { value: '' } }),
      el('option', { text: 'Yes', attrs: { value: 'yes' } }),
      el('option', { text: 'No', attrs: { value: 'no' } }),
    ]);
    container.append(el('label', { className: 'survey-question' }, [label, select]));
  }
  const issue = el('textarea', {
    attrs: {
      'data-q': 'issue_text', rows: '3',
      placeholder: 'Anything unclear, missing or wrong? (optional)',
    },
  });
  container.append(el('label', { className: 'survey-question' }, [
    'Comments', issue,
  ]));
  const submit = el('button', {
    className: 'primary', text: 'Send feedback',
    onClick: () => onFeedback(harvestFeedback(container)),
  });
  if (busy) submit.disabled = true;
  container.append(submit);
  return container;
}

function harvestFeedback(container: HTMLElement): FeedbackForm {
  const pick = (name: string): boolean | null => {
    const select = container.querySelector<HTMLSelectElement>(
      `select[data-q="${name}"]`);
    if (!select || select.value === '') return null;
    return select.value === 'yes';
  };
  const issue = container.querySelector<HTMLTextAreaElement>(
    'textarea[data-q="issue_text"]');
  return {
    issueText: issue ? issue.value : '',
    foundHelpful: pick('found_helpful'),
    understoodRights: pick('understood_rights'),
    wouldRecommend: pick('would_recommend'),
  };
}

interface ReviewHandlers {
  onRevise: (stepIndex: number, answerId: string) => void;
  onReopen: (stepIndex: number) => void;
  onBack: () => void;
}

export function renderReview(steps: Step[],
                             optionsFor: (criterionId: string) => AnswerOption[] | null,
                             busy: boolean, handlers: ReviewHandlers): HTMLElement {
  const section = el('section', { className: 'screen review' }, [
    el('h2', { text: 'Your answers' }),
    el('p', {
      className: 'review-hint',
      text: 'Changing an answer rewinds the interview to that question. '
        + 'Answers you gave after it are discarded.',
    }),
  ]);
  const list = el('ol', { className: 'review-steps' });
  for (const step of steps) {
    list.append(reviewItem(step, optionsFor(step.criterion_id), busy, handlers));
  }
  section.append(list);
  section.append(el('button', {
    className: 'link', text: 'Back', onClick: handlers.onBack,
  }));
  return section;
}

function reviewItem(step: Step, options: AnswerOption[] | null, busy: boolean,
                    handlers: ReviewHandlers): HTMLElement {
  const item = el('li', {
    className: 'review-step', attrs: { 'data-step-index': String(step.index) },
  }, [
    el('p', {}, [
      el('span', { className: 'review-question', text: step.criterion_title }),
      ' ',
      el('strong', { className: 'review-answer', text: step.answer_label }),
    ]),
  ]);
  const details = el('details', {}, [el('summary', { text: 'Change' })]);
  if (options && options.length > 0) {
    for (const option of options) {
      const button = el('button', {
        className: 'revise-option', text: option.label,
        attrs: {
          'data-step-index': String(step.index),
          'data-answer-id': option.id,
        },
        onClick: () => handlers.onRevise(step.index, option.id),
      });
      if (busy || option.id === step.answer_id) button.disabled = true;
      details.append(button);
    }
  } else {
    // The options for this question are not in memory (for example after a
    // restart); fall back to re-asking it.
    details.append(el('p', {
      text: 'To change this answer, the question will be asked again.',
    }));
    const reopen = el('button', {
      className: 'reopen', text: 'Ask this question again',
      attrs: { 'data-step-index': String(step.index) },
      onClick: () => handlers.onReopen(step.index),
    });
    if (busy) reopen.disabled = true;
    details.append(reopen);
  }
  item.append(details);
  return item;
}

export function renderFatal(message: string, onRestart: () => void): HTMLElement {
  return el('section', { className: 'screen fatal' }, [
    el('h2', { text: 'Something went wrong' }),
    el('p', { className: 'fatal-detail', text: message }),
    el('p', { text: 'You can start over. If the problem persists, try again later.' }),
    el('button', { className: 'primary', text: 'Start over', onClick: onRestart }),
  ]);
}
