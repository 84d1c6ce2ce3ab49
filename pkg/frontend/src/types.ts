// Wire types for the public /v1 API. Fractions travel as exact strings
// ("1/2", "0.2"); decimal companions are provided where the UI draws numbers.

export type MethodId = 'mv' | 'cav' | 'sv' | 'mbc' | 'av' | 'qv' | 'cumulative';

export type BallotShape =
  | 'single_choice'
  | 'per_option_score'
  | 'ranked_subset'
  | 'integer_allocation';

export interface MethodSpec {
  method_id: MethodId;
  score_levels: string[];
  ballot_shape: BallotShape;
  params: Record<string, number>;
}

export interface OptionDoc {
  option_id: string;
  label: string;
}

export interface QuestionDoc {
  question_id: string;
  text: string;
  options: OptionDoc[];
  enabled_methods: MethodSpec[];
}

export interface CampaignDefinition {
  campaign_id: string;
  title: string;
  designer_id: string;
  open_at: string;
  close_at: string;
  tags: string[];
  questions: QuestionDoc[];
  method_order_policy: 'fixed' | 'randomized_per_voter';
  parent_campaign_id: string | null;
  seed: number;
}

export interface CampaignView extends CampaignDefinition {
  status: 'draft' | 'open' | 'closed' | 'tallied';
  released: boolean;
  tallied_at: string | null;
}

export interface RawBallotDoc {
  shape: BallotShape;
  choice?: string;
  scores?: Record<string, string>;
  ranking?: string[];
  allocation?: Record<string, number>;
}

export interface ChoiceTraceDoc {
  ballot_opened_at: string;
  first_interaction_at: string;
  submitted_at: string;
  in_form_changes: number;
}

export interface TallyDoc {
  question_id: string;
  method_id: MethodId;
  option_ids: string[];
  aggregates: string[];
  aggregates_decimal: number[];
  normalized_share: string[] | null;
  normalized_share_decimal: number[] | null;
  ranking: string[][];
  linear_ranking: string[];
  first_choice_share: Record<string, string>;
  counted_ballots: number;
  interim: boolean;
}

export interface ConsistencyDoc {
  question_id: string;
  methods: MethodId[];
  per_rank: string[];
  per_rank_decimal: number[];
  mean: string;
  mean_decimal: number;
  tie_groups: Record<string, string[][]>;
}

export interface ResultsView {
  results: Record<string, TallyDoc[]>;
  consistency: Record<string, ConsistencyDoc>;
  interim: boolean;
}

export interface Problem {
  code: string;
  message: string;
  field?: string;
  violations?: { code: string; message: string; option_id?: string }[];
}

export interface Session {
  token: string;
  role: 'designer' | 'voter';
  principal: string;
  expires_at: string;
}
