/** Application model: one session, one in-flight mutation at a time. All
 * displayed affect values are service responses held verbatim. */

import { ApiError, type FluxClient } from "./api.js";
import type { SketchController } from "./sketch.js";
import type {
  EmotionState,
  LexiconEntry,
  SessionState,
  TurnResponse,
} from "./types.js";

export class AppController {
  session: SessionState | null = null;
  panels: TurnResponse[] = [];
  selectedKeyword: string | null = null;
  selectedEmoji: string | null = null;
  inFlight = false;
  lastError: string | null = null;
  fluxBanner: string | null = null;

  constructor(
    private readonly client: FluxClient,
    readonly sketch: SketchController,
    private readonly lexicon: LexiconEntry[],
  ) {}

  async startSession(anchor: string, canvas?: [number, number]): Promise<SessionState> {
    this.session = await this.client.createSession(anchor, undefined, canvas);
    this.panels = [];
    this.fluxBanner = null;
    this.lastError = null;
    return this.session;
  }

  selectKeyword(keyword: string): void {
    this.selectedKeyword = keyword;
  }

  selectEmoji(emoji: string): void {
    this.selectedEmoji = emoji;
  }

  /** Submit gate: box + keyword + emoji all set, session live, nothing in flight. */
  canSubmit(): boolean {
    return (
      this.session !== null &&
      !this.inFlight &&
      this.sketch.box !== null &&
      this.selectedKeyword !== null &&
      this.selectedEmoji !== null
    );
  }

  /** The weights of the currently selected emoji, for the particle burst. */
  selectedEmojiWeights(): EmotionState | null {
    const entry = this.lexicon.find((e) => e.emoji === this.selectedEmoji);
    return entry ? entry.weights : null;
  }

  /** Current radar vector: the last turn's state, else the session state. */
  radarState(): EmotionState | null {
    const last = this.panels[this.panels.length - 1];
    if (last !== undefined) return last.state;
    return this.session ? this.session.state : null;
  }

  /** One state per completed turn, for the radar trail. */
  stateHistory(): EmotionState[] {
    return this.panels.map((p) => p.state);
  }

  async submit(): Promise<TurnResponse | null> {
    if (!this.canSubmit()) return null;
    const session = this.session!;
    const box = this.sketch.box!;
    this.inFlight = true;
    this.lastError = null;
    try {
      const turn = await this.client.submitPanel(session.session_id, {
        box,
        strokes: this.sketch.toStrokesPayload(),
        keyword: this.selectedKeyword!,
        emoji: this.selectedEmoji!,
      });
      this.panels.push(turn);
      this.fluxBanner = turn.flux_triggered_this_turn
        ? `Genre flux! The story shifts to ${turn.active_genre}`
        : null;
      this.sketch.reset();
      this.selectedKeyword = null;
      this.selectedEmoji = null;
      return turn;
    } catch (error) {
      // a rejected turn adds no panel and keeps the sketch for another try
      if (error instanceof ApiError) {
        this.lastError = error.detail;
        return null;
      }
      throw error;
    } finally {
      this.inFlight = false;
    }
  }

  async regenerate(turn: number): Promise<TurnResponse | null> {
    if (this.session === null || this.inFlight) return null;
    this.inFlight = true;
    try {
      const result = await this.client.regenerate(this.session.session_id, turn);
      const index = this.panels.findIndex((p) => p.turn_index === turn);
      if (index >= 0) this.panels[index] = result;
      return result;
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastError = error.detail;
        return null;
      }
      throw error;
    } finally {
      this.inFlight = false;
    }
  }
}
