import { ApiClient } from "./api.js";
import { draw, legendRows, pickKeypoint, screenToUv } from "./render.js";
import { loadSession, saveSession, snapForEdit } from "./session.js";
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function banner(kind, text) {
    const box = el("banner");
    box.className = `banner ${kind}`;
    box.textContent = text;
    box.style.display = text ? "block" : "none";
}
async function boot() {
    const canvas = el("editor");
    const ctx = canvas.getContext("2d");
    if (!ctx)
        throw new Error("canvas 2d context unavailable");
    const vp = {
        width: canvas.width,
        height: canvas.height,
        margin: 16,
    };
    const api = new ApiClient(window.location.origin);
    let session;
    try {
        session = await loadSession(api);
    }
    catch (err) {
        banner("error", `cannot reach the densemark serve API: ${err}`);
        return;
    }
    let mode = "select";
    let dragging = false;
    const refresh = () => {
        draw(ctx, session.template, session.state, vp);
        el("legend").innerHTML = legendRows(session.state)
            .map((row) => `<li><span class="dot ${row.split(":")[0]}"></span>${row}</li>`)
            .join("");
        el("status").textContent =
            `${session.state.points.length} keypoints, v${session.state.version}` +
                (session.state.dirty ? " (unsaved)" : "");
        (el("undo")).disabled = !session.state.canUndo;
        (el("redo")).disabled = !session.state.canRedo;
        (el("save")).disabled = !session.state.dirty;
    };
    canvas.addEventListener("mousedown", (ev) => {
        const rect = canvas.getBoundingClientRect();
        const x = ev.clientX - rect.left;
        const y = ev.clientY - rect.top;
        if (mode === "add") {
            const [u, v] = screenToUv(x, y, vp);
            const snap = snapForEdit(session, u, v);
            const result = session.state.add(snap.vertex, snap.uv);
            banner(result.ok ? "ok" : "error", result.ok ? `added vertex ${snap.vertex}` : result.reason);
            refresh();
            return;
        }
        const hit = pickKeypoint(session.state, x, y, vp);
        session.state.select(hit);
        dragging = hit !== null;
        refresh();
    });
    canvas.addEventListener("mousemove", (ev) => {
        if (!dragging || session.state.selection === null)
            return;
        const rect = canvas.getBoundingClientRect();
        const [u, v] = screenToUv(ev.clientX - rect.left, ev.clientY - rect.top, vp);
        const snap = snapForEdit(session, u, v);
        const result = session.state.move(session.state.selection, snap.vertex, snap.uv);
        if (!result.ok)
            banner("error", result.reason);
        refresh();
    });
    window.addEventListener("mouseup", () => {
        dragging = false;
    });
    el("mode-select").addEventListener("click", () => {
        mode = "select";
        banner("info", "select mode: click a point, drag to move");
    });
    el("mode-add").addEventListener("click", () => {
        mode = "add";
        banner("info", "add mode: click an empty spot to add a keypoint");
    });
    el("delete").addEventListener("click", () => {
        const result = session.state.remove();
        banner(result.ok ? "ok" : "info", result.ok ? "deleted" : result.reason);
        refresh();
    });
    el("undo").addEventListener("click", () => {
        session.state.undo();
        refresh();
    });
    el("redo").addEventListener("click", () => {
        session.state.redo();
        refresh();
    });
    el("save").addEventListener("click", async () => {
        if (!session.state.dirty)
            return;
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
