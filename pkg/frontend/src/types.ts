export type StanceLabel = 'favor' | 'against' | 'neutral';

export const LABELS: StanceLabel[] = ['favor', 'against', 'neutral'];

export interface Counts {
  total: number;
  disagreements: number;
  unresolved_disagreements: number;
  gold: number;
  pending: number;
  labelled?: number;
  remaining?: number;
}

export interface NextItem {
  done: boolean;
  counts: Counts;
  tweet_id?: string;
  text?: string;
  position?: number;
}

export interface TweetStatus {
  tweet_id: string;
  labels: Record<string, StanceLabel>;
  complete: boolean;
  adjudicated: boolean;
}

export interface Disagreement {
  tweet_id: string;
  text: string;
  labels: Record<string, StanceLabel>;
  resolved: boolean;
  final_label?: StanceLabel;
}

export interface GoldEntry {
  tweet_id: string;
  label: StanceLabel;
  origin: 'agreed' | 'adjudicated';
}

export interface GoldResponse {
  gold: GoldEntry[];
  pending: string[];
}

export interface TaskSummary {
  task_id: string;
  annotators: string[];
  counts: Counts;
}
