import { z } from 'zod';

// Zod mirrors of the service payloads. Everything the app consumes is
// parsed through these at the HTTP boundary, so a server/client drift
// fails loudly instead of rendering garbage.

export const CasePanelSchema = z.object({
  case_id: z.string(),
  citation: z.string(),
  decision_date: z.string(),
  summary: z.string(),
});

export const AnswerOptionSchema = z.object({
  id: z.string(),
  label: z.string(),
});

export const PromptViewSchema = z.object({
  type: z.literal('prompt'),
  criterion_id: z.string(),
  title: z.string(),
  description: z.string(),
  answers: z.array(AnswerOptionSchema).min(1),
  applied_examples: z.array(CasePanelSchema).max(5),
  not_applied_examples: z.array(CasePanelSchema).max(5),
});

export const ConclusionSchema = z.object({
  conclusion_id: z.string(),
  title: z.string(),
  explanation: z.string(),
});

export const MatchedCaseSchema = CasePanelSchema.extend({
  conclusion_id: z.string(),
});

export const NextStepSchema = z.object({
  title: z.string(),
  text: z.string(),
});

export const AnalysisViewSchema = z.object({
  type: z.literal('analysis'),
  past_outcomes_only: z.literal(true),
  conclusions: z.array(ConclusionSchema),
  matched_cases: z.array(MatchedCaseSchema),
  next_steps: z.array(NextStepSchema),
});

export const ViewSchema = z.discriminatedUnion('type', [
  PromptViewSchema,
  AnalysisViewSchema,
]);

export const StepSchema = z.object({
  index: z.number().int().nonnegative(),
  criterion_id: z.string(),
  criterion_title: z.string(),
  answer_id: z.string(),
  answer_label: z.string(),
});

export const SessionPayloadSchema = z.object({
  session_id: z.string().min(1),
  status: z.enum(['IN_PROGRESS', 'COMPLETE']),
  schema_id: z.string(),
  schema_version: z.string(),
  steps: z.array(StepSchema),
  view: ViewSchema,
});

export const HealthSchema = z.object({
  status: z.literal('ok'),
  bundle_loaded: z.boolean(),
});

export const BundleInfoSchema = z.object({
  title: z.string(),
  locale: z.string(),
  published_date: z.string(),
  schema_id: z.string(),
  schema_version: z.string(),
  block_count: z.number().int().positive(),
});

export const ErrorEnvelopeSchema = z.object({
  error: z.object({
    code: z.string().min(1),
    message: z.string(),
  }),
});

export const EventAcceptedSchema = z.object({ accepted: z.literal(true) });
export const FeedbackRecordedSchema = z.object({ recorded: z.literal(true) });

export const PathwayStatsSchema = z.object({
  from: z.string(),
  to: z.string(),
  total: z.number().int().nonnegative(),
  rows: z.array(z.object({
    label: z.string(),
    count: z.number().int().nonnegative(),
    percentage: z.number().int(),
  })),
  role_total: z.number().int().nonnegative(),
  tenant_percentage: z.number().int(),
  landlord_percentage: z.number().int(),
});

const SurveyQuestionSchema = z.object({
  yes: z.number().int().nonnegative(),
  no: z.number().int().nonnegative(),
  answered: z.number().int().nonnegative(),
  percentage_yes: z.number().int(),
});

export const FeedbackStatsSchema = z.object({
  total: z.number().int().nonnegative(),
  with_issue_text: z.number().int().nonnegative(),
  found_helpful: SurveyQuestionSchema,
  understood_rights: SurveyQuestionSchema,
  would_recommend: SurveyQuestionSchema,
});

export type CasePanel = z.infer<typeof CasePanelSchema>;
export type AnswerOption = z.infer<typeof AnswerOptionSchema>;
export type PromptView = z.infer<typeof PromptViewSchema>;
export type AnalysisView = z.infer<typeof AnalysisViewSchema>;
export type SessionPayload = z.infer<typeof SessionPayloadSchema>;
export type Step = z.infer<typeof StepSchema>;
export type Health = z.infer<typeof HealthSchema>;
export type BundleInfo = z.infer<typeof BundleInfoSchema>;
export type PathwayStats = z.infer<typeof PathwayStatsSchema>;
export type FeedbackStats = z.infer<typeof FeedbackStatsSchema>;
