/** Wire types for the genreflux service. The UI does no affective math of its
 * own: every number rendered anywhere comes from one of these payloads. */

/** Axis order is the serialization order of the service's state vector. */
export const AXES = ["romance", "tragedy", "chaos", "mystery"] as const;

export type GenreKey = (typeof AXES)[number];

export type EmotionState = Record<GenreKey, number>;

export interface ServiceConfig {
  decay: number;
  flux_threshold: number;
  beta_min: number;
  beta_max: number;
  max_side: number;
  panoramic_min: number;
  closeup_max: number;
}

export interface VocabEntry {
  keyword: string;
  weights: EmotionState;
  frequency: number;
  scene_fragment: string;
}

export interface LexiconEntry {
  emoji: string;
  weights: EmotionState;
}

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface StrokesPayload {
  polylines: number[][][];
  stroke_width: number;
}

export interface TurnResponse {
  session_id: string;
  turn_index: number;
  regeneration_counter: number;
  state: EmotionState;
  active_genre: string | null;
  flux_triggered_this_turn: boolean;
  image_name: string;
  image: string;
  prompt_preview: string;
  backend_id: string;
  request_digest: string;
  width: number;
  height: number;
}

export interface HistoryEntry {
  turn_index: number;
  state: EmotionState;
  active_genre: string | null;
}

export interface SessionState {
  session_id: string;
  anchor: string;
  config: { decay: number; flux_threshold: number };
  canvas: [number, number];
  turn_index: number;
  state: EmotionState;
  active_genre: string | null;
  history: HistoryEntry[];
}
