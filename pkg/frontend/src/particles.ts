/** Particle burst feedback for affective injections. The burst color comes
 * from the injected emoji's dominant weight dimension, looked up in the
 * lexicon the service provided. */

import { AXES, type EmotionState, type GenreKey } from "./types.js";

export const GENRE_PALETTE: Record<GenreKey, string> = {
  romance: "#e75480", // rose
  tragedy: "#3b6fd4", // blue
  chaos: "#f28c28", // orange
  mystery: "#8a5fc4", // violet
};

export const NEUTRAL_COLOR = "#9aa0a6";

/** Largest weight dimension in axis order; null when every weight is zero. */
export function dominantDimension(weights: EmotionState): GenreKey | null {
  let best: GenreKey | null = null;
  let bestValue = 0;
  for (const axis of AXES) {
    if (weights[axis] > bestValue) {
      best = axis;
      bestValue = weights[axis];
    }
  }
  return best;
}

export function burstColor(weights: EmotionState): string {
  const dominant = dominantDimension(weights);
  return dominant === null ? NEUTRAL_COLOR : GENRE_PALETTE[dominant];
}

export interface Particle {
  x: number;
  y: number;
  vx: number;
  vy: number;
  life: number; // seconds remaining
  color: string;
}

export function spawnBurst(
  cx: number,
  cy: number,
  color: string,
  count = 28,
  rng: () => number = Math.random,
): Particle[] {
  const particles: Particle[] = [];
  for (let i = 0; i < count; i++) {
    const angle = rng() * 2 * Math.PI;
    const speed = 40 + rng() * 140;
    particles.push({
      x: cx,
      y: cy,
      vx: Math.cos(angle) * speed,
      vy: Math.sin(angle) * speed - 30,
      life: 0.6 + rng() * 0.5,
      color,
    });
  }
  return particles;
}

/** Advance and cull; gravity pulls the burst down as it fades. */
export function stepParticles(particles: Particle[], dt: number): Particle[] {
  const next: Particle[] = [];
  for (const p of particles) {
    const life = p.life - dt;
    if (life <= 0) continue;
    next.push({
      x: p.x + p.vx * dt,
      y: p.y + p.vy * dt,
      vx: p.vx * 0.98,
      vy: p.vy * 0.98 + 160 * dt,
      life,
      color: p.color,
    });
  }
  return next;
}
