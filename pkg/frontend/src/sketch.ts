/** Panel sketching model: first drag frames the panel box, following drags
 * draw freehand strokes inside it. Coordinates are kept in canvas units; the
 * strokes payload is panel-local, matching the service contract. */

import type { Box, StrokesPayload } from "./types.js";

export type AspectBadge = "Panoramic" | "Medium" | "CloseUp";

export interface AspectThresholds {
  panoramic_min: number;
  closeup_max: number;
}

/** Mirror of the service's box classification; cutoffs are inclusive and come
 * from GET /config, never hardcoded here. */
export function classifyAspect(
  width: number,
  height: number,
  thresholds: AspectThresholds,
): AspectBadge {
  const ratio = width / height;
  if (ratio >= thresholds.panoramic_min) return "Panoramic";
  if (ratio <= thresholds.closeup_max) return "CloseUp";
  return "Medium";
}

interface Drag {
  startX: number;
  startY: number;
  x: number;
  y: number;
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

export function dragToBox(drag: Drag): Box {
  const x = Math.min(drag.startX, drag.x);
  const y = Math.min(drag.startY, drag.y);
  return {
    x,
    y,
    width: Math.abs(drag.x - drag.startX),
    height: Math.abs(drag.y - drag.startY),
  };
}

export class SketchController {
  box: Box | null = null;
  strokes: number[][][] = [];
  private drag: Drag | null = null;
  private stroke: number[][] | null = null;

  constructor(
    private readonly canvas: { width: number; height: number },
    private readonly thresholds: AspectThresholds,
  ) {}

  /** Begin a box drag (no box yet) or a stroke (box already framed). */
  pointerDown(x: number, y: number): void {
    const cx = clamp(x, 0, this.canvas.width);
    const cy = clamp(y, 0, this.canvas.height);
    if (this.box === null) {
      this.drag = { startX: cx, startY: cy, x: cx, y: cy };
    } else {
      this.stroke = [this.localPoint(cx, cy)];
    }
  }

  pointerMove(x: number, y: number): void {
    const cx = clamp(x, 0, this.canvas.width);
    const cy = clamp(y, 0, this.canvas.height);
    if (this.drag !== null) {
      this.drag.x = cx;
      this.drag.y = cy;
    } else if (this.stroke !== null) {
      this.stroke.push(this.localPoint(cx, cy));
    }
  }

  pointerUp(): void {
    if (this.drag !== null) {
      const box = dragToBox(this.drag);
      this.drag = null;
      // a click without movement frames nothing
      if (box.width >= 1 && box.height >= 1) this.box = box;
    } else if (this.stroke !== null) {
      if (this.stroke.length >= 2) this.strokes.push(this.stroke);
      this.stroke = null;
    }
  }

  /** Escape cancels the whole in-progress sketch. */
  escape(): void {
    this.drag = null;
    this.stroke = null;
    this.box = null;
    this.strokes = [];
  }

  /** Live badge: follows the drag while framing, then sticks to the box. */
  badge(): AspectBadge | null {
    const box = this.drag !== null ? dragToBox(this.drag) : this.box;
    if (box === null || box.width < 1 || box.height < 1) return null;
    return classifyAspect(box.width, box.height, this.thresholds);
  }

  /** In-progress rectangle for rendering, whether mid-drag or framed. */
  currentBox(): Box | null {
    return this.drag !== null ? dragToBox(this.drag) : this.box;
  }

  toStrokesPayload(strokeWidth = 3): StrokesPayload {
    return { polylines: this.strokes.map((line) => line.map((p) => [...p])), stroke_width: strokeWidth };
  }

  reset(): void {
    this.escape();
  }

  private localPoint(x: number, y: number): number[] {
    const box = this.box;
    if (box === null) return [x, y];
    return [
      clamp(x - box.x, 0, box.width),
      clamp(y - box.y, 0, box.height),
    ];
  }
}
