/** DOM bootstrap: wires the models to the page. Everything stateful lives in
 * AppController/SketchController so the logic stays testable without a DOM. */

import { FluxClient } from "./api.js";
import { AppController } from "./app.js";
import { emojiName } from "./names.js";
import {
  GENRE_PALETTE,
  burstColor,
  spawnBurst,
  stepParticles,
  type Particle,
} from "./particles.js";
import {
  axisEndpoints,
  polygonPath,
  ringRadius,
  statePolygon,
  trailPolygons,
  type RadarLayout,
} from "./radar.js";
import { SketchController } from "./sketch.js";
import { AXES, type EmotionState } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
// sessions are created with this exact canvas so page pixels are service units
const CANVAS = { width: 800, height: 600 };

const ZERO_STATE: EmotionState = { romance: 0, tragedy: 0, chaos: 0, mystery: 0 };

async function boot(): Promise<void> {
  const client = new FluxClient("");
  const [config, vocab, lexicon] = await Promise.all([
    client.config(),
    client.vocab(),
    client.lexicon(),
  ]);

  const sketch = new SketchController(CANVAS, config);
  const app = new AppController(client, sketch, lexicon);

  const board = document.getElementById("board") as HTMLCanvasElement;
  board.width = CANVAS.width;
  board.height = CANVAS.height;
  const boardCtx = board.getContext("2d")!;

  const fx = document.getElementById("fx") as HTMLCanvasElement;
  fx.width = CANVAS.width;
  fx.height = CANVAS.height;
  const fxCtx = fx.getContext("2d")!;

  const radarSvg = document.getElementById("radar") as unknown as SVGSVGElement;
  const layout: RadarLayout = { cx: 110, cy: 110, radius: 90 };
  const badge = document.getElementById("badge")!;
  const banner = document.getElementById("banner")!;
  const toast = document.getElementById("toast")!;
  const strip = document.getElementById("strip")!;
  const submitBtn = document.getElementById("submit") as HTMLButtonElement;
  const exportLink = document.getElementById("export") as HTMLAnchorElement;
  const keywordPane = document.getElementById("keywords")!;
  const emojiPane = document.getElementById("emojis")!;
  const anchorInput = document.getElementById("anchor") as HTMLInputElement;
  const startBtn = document.getElementById("start") as HTMLButtonElement;

  let particles: Particle[] = [];
  let lastFrame = performance.now();

  function pagePoint(event: PointerEvent): [number, number] {
    const rect = board.getBoundingClientRect();
    return [event.clientX - rect.left, event.clientY - rect.top];
  }

  function drawBoard(): void {
    boardCtx.clearRect(0, 0, board.width, board.height);
    boardCtx.strokeStyle = "#555";
    boardCtx.fillStyle = "#111";

    for (const panel of app.panels) {
      // placed panels render their generated image inside their box
      const img = new Image();
      img.src = client.imageUrl(panel.image);
      const box = panelBoxOf(panel.turn_index);
      if (box) {
        img.onload = () => boardCtx.drawImage(img, box.x, box.y, box.width, box.height);
      }
    }
    const current = sketch.currentBox();
    if (current) {
      boardCtx.strokeStyle = "#3b6fd4";
      boardCtx.strokeRect(current.x, current.y, current.width, current.height);
      boardCtx.strokeStyle = "#ccc";
      for (const line of sketch.strokes) {
        boardCtx.beginPath();
        for (const [i, point] of line.entries()) {
          const px = current.x + (point[0] ?? 0);
          const py = current.y + (point[1] ?? 0);
          if (i === 0) boardCtx.moveTo(px, py);
          else boardCtx.lineTo(px, py);
        }
        boardCtx.stroke();
      }
    }
  }

  function panelBoxOf(turn: number) {
    // the service stores boxes in canvas units; we only remember our own
    const submitted = submittedBoxes.get(turn);
    return submitted ?? null;
  }
  const submittedBoxes = new Map<number, { x: number; y: number; width: number; height: number }>();

  function drawRadar(): void {
    const state = app.radarState() ?? ZERO_STATE;
    const threshold = config.flux_threshold;
    while (radarSvg.firstChild) radarSvg.removeChild(radarSvg.firstChild);

    for (const end of axisEndpoints(layout)) {
      const spoke = document.createElementNS(SVG_NS, "line");
      spoke.setAttribute("x1", String(layout.cx));
      spoke.setAttribute("y1", String(layout.cy));
      spoke.setAttribute("x2", String(end.x));
      spoke.setAttribute("y2", String(end.y));
      spoke.setAttribute("class", "spoke");
      radarSvg.appendChild(spoke);
    }

    const ring = document.createElementNS(SVG_NS, "circle");
    ring.setAttribute("cx", String(layout.cx));
    ring.setAttribute("cy", String(layout.cy));
    ring.setAttribute("r", String(ringRadius(state, threshold, layout)));
    ring.setAttribute("class", "ring");
    radarSvg.appendChild(ring);

    const trail = trailPolygons(app.stateHistory(), threshold, layout);
    trail.slice(0, -1).forEach((points, i) => {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", polygonPath(points));
      path.setAttribute("class", "trail");
      path.setAttribute("opacity", String(0.1 + (0.3 * (i + 1)) / trail.length));
      radarSvg.appendChild(path);
    });

    const poly = document.createElementNS(SVG_NS, "path");
    poly.setAttribute("d", polygonPath(statePolygon(state, threshold, layout)));
    poly.setAttribute("class", "state");
    radarSvg.appendChild(poly);

    AXES.forEach((axis, i) => {
      const end = axisEndpoints(layout)[i]!;
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(layout.cx + (end.x - layout.cx) * 1.17));
      label.setAttribute("y", String(layout.cy + (end.y - layout.cy) * 1.17));
      label.setAttribute("fill", GENRE_PALETTE[axis]);
      label.setAttribute("class", "axis-label");
      label.textContent = `${axis} ${(state[axis] ?? 0).toFixed(2)}`;
      radarSvg.appendChild(label);
    });
  }

  function drawStrip(): void {
    strip.innerHTML = "";
    for (const panel of app.panels) {
      const cell = document.createElement("div");
      cell.className = "panel-cell";
      cell.title = panel.prompt_preview; // prompt on hover
      const img = document.createElement("img");
      img.src = client.imageUrl(panel.image);
      img.alt = `panel ${panel.turn_index}`;
      const reroll = document.createElement("button");
      reroll.textContent = "reroll";
      reroll.onclick = () => {
        void app.regenerate(panel.turn_index).then(refresh);
      };
      cell.append(img, reroll);
      strip.appendChild(cell);
    }
  }

  function refresh(): void {
    badge.textContent = sketch.badge() ?? "";
    banner.textContent = app.fluxBanner ?? "";
    banner.classList.toggle("visible", app.fluxBanner !== null);
    toast.textContent = app.lastError ?? "";
    toast.classList.toggle("visible", app.lastError !== null);
    submitBtn.disabled = !app.canSubmit();
    for (const btn of document.querySelectorAll<HTMLButtonElement>(".choice")) {
      btn.disabled = app.inFlight;
    }
    if (app.session) {
      exportLink.setAttribute("href", client.exportUrl(app.session.session_id));
      exportLink.classList.toggle("hidden", app.panels.length === 0);
    }
    drawBoard();
    drawRadar();
    drawStrip();
  }

  function buildPalettes(): void {
    for (const entry of vocab) {
      const btn = document.createElement("button");
      btn.className = "choice keyword";
      btn.textContent = entry.keyword;
      btn.title = entry.scene_fragment;
      btn.onclick = () => {
        app.selectKeyword(entry.keyword);
        markSelected(keywordPane, btn);
        refresh();
      };
      keywordPane.appendChild(btn);
    }
    for (const entry of lexicon) {
      const btn = document.createElement("button");
      btn.className = "choice emoji";
      // glyph and name side by side
      btn.textContent = `${entry.emoji} ${emojiName(entry.emoji, entry.weights)}`;
      btn.onclick = () => {
        app.selectEmoji(entry.emoji);
        markSelected(emojiPane, btn);
        refresh();
      };
      emojiPane.appendChild(btn);
    }
  }

  function markSelected(pane: HTMLElement, chosen: HTMLButtonElement): void {
    for (const btn of pane.querySelectorAll("button")) btn.classList.remove("selected");
    chosen.classList.add("selected");
  }

  board.addEventListener("pointerdown", (e) => {
    const [x, y] = pagePoint(e);
    sketch.pointerDown(x, y);
    refresh();
  });
  board.addEventListener("pointermove", (e) => {
    const [x, y] = pagePoint(e);
    sketch.pointerMove(x, y);
    refresh();
  });
  board.addEventListener("pointerup", () => {
    sketch.pointerUp();
    refresh();
  });
  document.addEventListener("keydown", (e) => {
    if (e.key === "Escape") {
      sketch.escape();
      refresh();
    }
  });

  startBtn.onclick = () => {
    const anchor = anchorInput.value || "young woman, silver bob haircut";
    void app.startSession(anchor, [CANVAS.width, CANVAS.height]).then(refresh);
  };

  submitBtn.onclick = () => {
    const weights = app.selectedEmojiWeights();
    const box = sketch.box;
    void app.submit().then((turn) => {
      if (turn && weights && box) {
        submittedBoxes.set(turn.turn_index, box);
        const burstAt = {
          x: box.x + box.width / 2,
          y: box.y + box.height / 2,
        };
        particles = particles.concat(
          spawnBurst(burstAt.x, burstAt.y, burstColor(weights)),
        );
      }
      refresh();
    });
    refresh(); // reflect the in-flight lockout immediately
  };

  function animate(now: number): void {
    const dt = Math.min(0.05, (now - lastFrame) / 1000);
    lastFrame = now;
    particles = stepParticles(particles, dt);
    fxCtx.clearRect(0, 0, fx.width, fx.height);
    for (const p of particles) {
      fxCtx.globalAlpha = Math.min(1, p.life * 2);
      fxCtx.fillStyle = p.color;
      fxCtx.fillRect(p.x - 2, p.y - 2, 4, 4);
    }
    fxCtx.globalAlpha = 1;
    requestAnimationFrame(animate);
  }

  buildPalettes();
  refresh();
  requestAnimationFrame(animate);
}

void boot();
