/** Display names shown next to emoji glyphs in the palette. Purely cosmetic;
 * emojis missing here fall back to their dominant weight dimension. */

import { burstColor, dominantDimension } from "./particles.js";
import type { EmotionState } from "./types.js";

const EMOJI_NAMES: Record<string, string> = {
  "❤️": "Love",
  "💋": "Kiss",
  "🌹": "Rose",
  "💐": "Bouquet",
  "😍": "Smitten",
  "🕊️": "Dove",
  "🥀": "Wilted Rose",
  "💔": "Heartbreak",
  "😢": "Crying",
  "⚰️": "Coffin",
  "🌧️": "Rain Cloud",
  "😱": "Screaming",
  "🌀": "Cyclone",
  "⚡": "Lightning",
  "🔥": "Fire",
  "🤪": "Zany",
  "🎲": "Dice",
  "😟": "Worried",
  "🕵️": "Detective",
  "🌫️": "Fog",
  "🗝️": "Old Key",
  "🔍": "Magnifier",
  "🌙": "Moonlight",
  "🕯️": "Candle",
  "😐": "Neutral",
};

export function emojiName(emoji: string, weights: EmotionState): string {
  const known = EMOJI_NAMES[emoji];
  if (known !== undefined) return known;
  const dominant = dominantDimension(weights);
  return dominant === null ? "Neutral" : dominant;
}

export { burstColor };
