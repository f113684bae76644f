import { ApiClient } from "./api.js";
import { draw, legendRows, pickKeypoint, screenToUv, Viewport } from "./render.js";
import { loadSession, saveSession, Session, snapForEdit } from "./session.js";

type Mode = "select" | "add";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function banner(kind: "info" | "error" | "ok", text: string): void {
  const box = el<HTMLDivElement>("banner");
  box.className = `banner ${kind}`;
  box.textContent = text;
  box.style.display = text ? "block" : "none";
}

async function boot(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("editor");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  const vp: Viewport = {
    width: canvas.width,
    height: canvas.height,
    margin: 16,
  };
  const api = new ApiClient(window.location.origin);

  let session: Session;
  try {
    session = await loadSession(api);
  } catch (err) {
    banner("error", `cannot reach the densemark serve API: ${err}`);
    return;
  }

  let mode: Mode = "select";
  let dragging = false;

  const refresh = (): void => {
    draw(ctx, session.template, session.state, vp);
    el<HTMLUListElement>("legend").innerHTML = legendRows(session.state)
      .map((row) => `<li><span class="dot ${row.split(":")[0]}"></span>${row}</li>`)
      .join("");
    el<HTMLSpanElement>("status").textContent =
      `${session.state.points.length} keypoints, v${session.state.version}` +
      (session.state.dirty ? " (unsaved)" : "");
    (el<HTMLButtonElement>("undo")).disabled = !session.state.canUndo;
    (el<HTMLButtonElement>("redo")).disabled = !session.state.canRedo;
    (el<HTMLButtonElement>("save")).disabled = !session.state.dirty;
  };

  canvas.addEventListener("mousedown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    if (mode === "add") {
      const [u, v] = screenToUv(x, y, vp);
      const snap = snapForEdit(session, u, v);
      const result = session.state.add(snap.vertex, snap.uv);
      banner(result.ok ? "ok" : "error",
             result.ok ? `added vertex ${snap.vertex}` : result.reason);
      refresh();
      return;
    }
    const hit = pickKeypoint(session.state, x, y, vp);
    session.state.select(hit);
    dragging = hit !== null;
    refresh();
  });

  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging || session.state.selection === null) return;
    const rect = canvas.getBoundingClientRect();
    const [u, v] = screenToUv(ev.clientX - rect.left, ev.clientY - rect.top,
                              vp);
    const snap = snapForEdit(session, u, v);
    const result = session.state.move(session.state.selection, snap.vertex,
                                      snap.uv);
    if (!result.ok) banner("error", result.reason);
    refresh();
  });

  window.addEventListener("mouseup", () => {
    dragging = false;
  });

  el<HTMLButtonElement>("mode-select").addEventListener("click", () => {
    mode = "select";
    banner("info", "select mode: click a point, drag to move");
  });
  el<HTMLButtonElement>("mode-add").addEventListener("click", () => {
    mode = "add";
    banner("info", "add mode: click an empty spot to add a keypoint");
  });
  el<HTMLButtonElement>("delete").addEventListener("click", () => {
    const result = session.state.remove();
    banner(result.ok ? "ok" : "info",
           result.ok ? "deleted" : result.reason);
    refresh();
  });
  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    session.state.undo();
    refresh();
  });
  el<HTMLButtonElement>("redo").addEventListener("click", () => {
    session.state.redo();
    refresh();
  });

  el<HTMLButtonElement>("save").addEventListener("click", async () => {
    if (!session.state.dirty) return;
    const result = await saveSession(api, session);
    switch (result.status) {
      case "saved":
        banner("ok", `saved (v${session.state.version})`);
        break;
      case "invalid":
        if (result.offendingOrdinal !== undefined) {
          session.state.select(result.offendingOrdinal);
        }
        banner("error", `rejected: ${result.message}`);
        break;
      case "stale":
        banner("error", `${result.message} — reload to pick up the latest ` +
               `version (your edits stay until you do)`);
        break;
      case "network":
        banner("error", `save failed (${result.message}); ` +
               `edits kept, try again`);
        break;
    }
    refresh();
  });

  banner("info", "loaded");
  refresh();
}

boot().catch((err) => banner("error", String(err)));
