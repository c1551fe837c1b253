// Browser entry point: builds the DOM, wires events into the App
// controller. All behavior lives in app.ts; keep this file dumb.

import { App } from "./app.js";
import { ApiClient } from "./client.js";
import type { Frame } from "./transform.js";

const SERVER = (window as { COSE_SERVER?: string }).COSE_SERVER ?? "http://127.0.0.1:8080";

const root = document.getElementById("app") ?? document.body;

const canvas = document.createElement("canvas");
canvas.width = 640;
canvas.height = 480;
canvas.style.border = "1px solid #ccc";
canvas.style.touchAction = "none";
root.append(canvas);

const controls = document.createElement("div");
root.append(controls);

const toast = document.createElement("div");
toast.className = "toast";
toast.style.minHeight = "1.2em";
toast.style.color = "#b02a37";
root.append(toast);

let toastTimer = 0;
const showToast = (msg: string) => {
  toast.textContent = msg;
  clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => (toast.textContent = ""), 4000);
};

const frame: Frame = { width: canvas.width, height: canvas.height, margin: 40 };
const app = new App({
  client: new ApiClient(SERVER),
  ctx: canvas.getContext("2d")!,
  frame,
  onToast: showToast,
});

// -- buttons ---------------------------------------------------------------

function button(label: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.addEventListener("click", onClick);
  controls.append(b);
  return b;
}

const suggestBtn = button("Suggest", () => void app.fetchSuggestions().then(sync));
const acceptButtons = [0, 1, 2].map((i) =>
  button(`Accept ${i + 1}`, () => {
    app.accept(i);
    sync();
  }),
);
button("Reject", () => {
  app.rejectAll();
  sync();
});
const undoBtn = button("Undo", () => {
  app.undo();
  sync();
});
const redoBtn = button("Redo", () => {
  app.redo();
  sync();
});
button("Clear", () => {
  app.clear();
  sync();
});

// steps slider + fixed-seed checkbox drive hands-off completion
const steps = document.createElement("input");
steps.type = "range";
steps.min = "1";
steps.max = "10";
steps.value = "3";
controls.append(steps);

const fixedSeed = document.createElement("input");
fixedSeed.type = "checkbox";
fixedSeed.checked = true;
const seedLabel = document.createElement("label");
seedLabel.append(fixedSeed, "fixed seed");
controls.append(seedLabel);

button("Complete", () => {
  const seed = fixedSeed.checked ? 0 : Math.floor(Math.random() * 2 ** 31);
  void app.runRollout(Number(steps.value), seed).then(sync);
});

function sync(): void {
  suggestBtn.disabled = !app.canSuggest;
  const haveView = app.view !== null;
  acceptButtons.forEach((b, i) => {
    b.disabled = !haveView || i >= (app.view?.candidates.length ?? 0);
  });
  undoBtn.disabled = !app.store.canUndo;
  redoBtn.disabled = !app.store.canRedo;
}

// -- pointer events --------------------------------------------------------

canvas.addEventListener("pointerdown", (e) => {
  canvas.setPointerCapture(e.pointerId);
  app.pointerDown({ x: e.offsetX, y: e.offsetY, t_ms: e.timeStamp });
});
canvas.addEventListener("pointermove", (e) => {
  app.pointerMove({ x: e.offsetX, y: e.offsetY, t_ms: e.timeStamp });
});
canvas.addEventListener("pointerup", () => {
  app.pointerUp();
  sync();
});

// -- startup ---------------------------------------------------------------

app.redraw();
sync();

new ApiClient(SERVER)
  .health()
  .then((h) => showToast(`model ready: ${h.parameters.toLocaleString()} parameters`))
  .catch(() => {
    app.online = false; // draw-only mode
    showToast("server unreachable; drawing only");
    sync();
  });
