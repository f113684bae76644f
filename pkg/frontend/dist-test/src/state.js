/**
 * Client copy of the keypoint set plus selection, undo/redo history and
 * dirty tracking. Edits snapshot the keypoint payload, so undo followed by
 * redo restores it exactly; selection is ephemeral UI state (clamped, never
 * replayed). dirty is true iff the payload differs from the last
 * server-acknowledged version.
 */
export class EditorState {
    points = [];
    selection = null;
    version = 0;
    templateVertexCount = 0;
    /** mirror table as last received; only sent back when indices unchanged */
    serverMirror = [];
    baseline = "";
    undoStack = [];
    redoStack = [];
    static fromServer(doc, uvOf) {
        const state = new EditorState();
        state.version = doc.version;
        state.templateVertexCount = doc.templateVertexCount;
        state.serverMirror = [...doc.mirror];
        state.points = doc.indices.map((vertex, k) => ({
            vertex,
            provenance: doc.provenance[k] ?? "manual",
            uv: uvOf(vertex),
            uvHint: null,
        }));
        state.markSaved(doc.version);
        return state;
    }
    payloadKey() {
        return JSON.stringify(this.points.map((p) => [p.vertex, p.provenance, p.uvHint]));
    }
    get dirty() {
        return this.payloadKey() !== this.baseline;
    }
    get canUndo() {
        return this.undoStack.length > 0;
    }
    get canRedo() {
        return this.redoStack.length > 0;
    }
    /** Adopt the current payload as the server-acknowledged version. */
    markSaved(version) {
        this.version = version;
        this.baseline = this.payloadKey();
        for (const p of this.points)
            p.uvHint = null;
        this.baseline = this.payloadKey();
    }
    snapshot() {
        return {
            points: this.points.map((p) => ({
                ...p,
                uv: [...p.uv],
                uvHint: p.uvHint ? [...p.uvHint] : null,
            })),
        };
    }
    restore(snap) {
        this.points = snap.points.map((p) => ({
            ...p,
            uv: [...p.uv],
            uvHint: p.uvHint ? [...p.uvHint] : null,
        }));
        if (this.selection !== null && this.selection >= this.points.length)
            this.selection = this.points.length ? this.points.length - 1 : null;
    }
    beginEdit() {
        return this.snapshot();
    }
    commitEdit(before) {
        this.undoStack.push(before);
        this.redoStack = [];
    }
    select(ordinal) {
        this.selection = ordinal;
    }
    vertexTaken(vertex, exceptOrdinal) {
        return this.points.some((p, k) => p.vertex === vertex && k !== exceptOrdinal);
    }
    /** Move the selected keypoint onto a (snapped) vertex. */
    move(ordinal, vertex, uv) {
        const point = this.points[ordinal];
        if (!point)
            return { ok: false, reason: `no keypoint ${ordinal}` };
        if (vertex < 0 || vertex >= this.templateVertexCount)
            return { ok: false, reason: "vertex outside template" };
        if (this.vertexTaken(vertex, ordinal))
            return { ok: false, reason: `vertex ${vertex} already used` };
        const before = this.beginEdit();
        point.vertex = vertex;
        point.uv = [...uv];
        point.uvHint = [...uv];
        point.provenance = "manual";
        this.selection = ordinal;
        this.commitEdit(before);
        return { ok: true };
    }
    add(vertex, uv) {
        if (vertex < 0 || vertex >= this.templateVertexCount)
            return { ok: false, reason: "vertex outside template" };
        if (this.vertexTaken(vertex, null))
            return { ok: false, reason: `vertex ${vertex} already used` };
        const before = this.beginEdit();
        this.points.push({
            vertex,
            provenance: "manual",
            uv: [...uv],
            uvHint: [...uv],
        });
        this.selection = this.points.length - 1;
        this.commitEdit(before);
        return { ok: true };
    }
    /** Delete the selected keypoint; without a selection this is a no-op. */
    remove() {
        if (this.selection === null)
            return { ok: false, reason: "select a keypoint to delete" };
        const before = this.beginEdit();
        this.points.splice(this.selection, 1);
        this.selection = null;
        this.commitEdit(before);
        return { ok: true };
    }
    undo() {
        const snap = this.undoStack.pop();
        if (!snap)
            return false;
        this.redoStack.push(this.snapshot());
        this.restore(snap);
        return true;
    }
    redo() {
        const snap = this.redoStack.pop();
        if (!snap)
            return false;
        this.undoStack.push(this.snapshot());
        this.restore(snap);
        return true;
    }
    /** Counters for the provenance legend. */
    provenanceCounts() {
        const counts = new Map();
        for (const p of this.points)
            counts.set(p.provenance, (counts.get(p.provenance) ?? 0) + 1);
        return counts;
    }
    /**
     * PUT body for the server. Local invariants (index range, uniqueness)
     * hold by construction, so the client never sends a payload it can see
     * is invalid. The stale mirror table is omitted once indices changed;
     * the server rebuilds it.
     */
    toPutBody() {
        const indices = this.points.map((p) => p.vertex);
        const body = {
            version: this.version,
            templateVertexCount: this.templateVertexCount,
            indices,
            provenance: this.points.map((p) => p.provenance),
        };
        const sameIndices = indices.length === this.serverMirror.length &&
            this.baselineIndices().every((v, k) => v === indices[k]);
        if (sameIndices)
            body.mirror = [...this.serverMirror];
        if (this.points.some((p) => p.uvHint))
            body.uv = this.points.map((p) => p.uvHint);
        return body;
    }
    baselineIndices() {
        if (!this.baseline)
            return [];
        const rows = JSON.parse(this.baseline);
        return rows.map((r) => r[0]);
    }
    /** Exact-equality key over the undoable payload (selection excluded). */
    stateKey() {
        return JSON.stringify(this.points.map((p) => [p.vertex, p.provenance, p.uv, p.uvHint]));
    }
}
