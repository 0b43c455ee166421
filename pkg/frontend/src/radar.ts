/** Radar chart geometry. Pure functions: the app draws the returned points
 * onto an SVG; nothing here invents values, it only scales service state. */

import { AXES, type EmotionState } from "./types.js";

export interface RadarLayout {
  cx: number;
  cy: number;
  radius: number;
}

export interface Point {
  x: number;
  y: number;
}

/** Angle of axis i: romance points up, then clockwise in serialization order. */
export function axisAngle(index: number): number {
  return -Math.PI / 2 + (index * 2 * Math.PI) / AXES.length;
}

/** Display normalization: the chart edge sits at max(threshold * 1.2, peak). */
export function displayNorm(state: EmotionState, threshold: number): number {
  const peak = Math.max(...AXES.map((axis) => state[axis]));
  return Math.max(threshold * 1.2, peak);
}

export function vertex(
  value: number,
  axisIndex: number,
  norm: number,
  layout: RadarLayout,
): Point {
  const r = (value / norm) * layout.radius;
  const angle = axisAngle(axisIndex);
  return { x: layout.cx + r * Math.cos(angle), y: layout.cy + r * Math.sin(angle) };
}

/** State polygon vertices, one per axis in serialization order. */
export function statePolygon(
  state: EmotionState,
  threshold: number,
  layout: RadarLayout,
): Point[] {
  const norm = displayNorm(state, threshold);
  return AXES.map((axis, i) => vertex(state[axis], i, norm, layout));
}

/** Radius of the flux-threshold ring under the same normalization. */
export function ringRadius(
  state: EmotionState,
  threshold: number,
  layout: RadarLayout,
): number {
  return (threshold / displayNorm(state, threshold)) * layout.radius;
}

export function polygonPath(points: Point[]): string {
  if (points.length === 0) return "";
  const segments = points.map(
    (p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(2)},${p.y.toFixed(2)}`,
  );
  return segments.join(" ") + " Z";
}

/** Axis spoke endpoints at the chart edge, for grid rendering. */
export function axisEndpoints(layout: RadarLayout): Point[] {
  return AXES.map((_, i) => ({
    x: layout.cx + layout.radius * Math.cos(axisAngle(i)),
    y: layout.cy + layout.radius * Math.sin(axisAngle(i)),
  }));
}

/** One polygon per history entry; the trail fades oldest-first in the app.
 * All entries share the newest state's normalization so the trail, the live
 * polygon and the ring stay on one scale. */
export function trailPolygons(
  history: EmotionState[],
  threshold: number,
  layout: RadarLayout,
): Point[][] {
  const last = history[history.length - 1];
  if (last === undefined) return [];
  const norm = displayNorm(last, threshold);
  return history.map((state) =>
    AXES.map((axis, i) => vertex(state[axis], i, norm, layout)),
  );
}
