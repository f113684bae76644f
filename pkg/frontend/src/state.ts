import type { KeypointSetDoc, KeypointSetPut } from "./types.js";

/** One keypoint as the editor sees it. */
export interface EditorPoint {
  /** template vertex index */
  vertex: number;
  provenance: string;
  /** client-side UV, for drawing; server UVs for untouched points */
  uv: [number, number];
  /** pending re-snap hint sent to the server on save (moved/added points) */
  uvHint: [number, number] | null;
}

interface Snapshot {
  points: EditorPoint[];
}

export type EditResult =
  | { ok: true }
  | { ok: false; reason: string };

/**
 * Client copy of the keypoint set plus selection, undo/redo history and
 * dirty tracking. Edits snapshot the keypoint payload, so undo followed by
 * redo restores it exactly; selection is ephemeral UI state (clamped, never
 * replayed). dirty is true iff the payload differs from the last
 * server-acknowledged version.
 */
export class EditorState {
  points: EditorPoint[] = [];
  selection: number | null = null;
  version = 0;
  templateVertexCount = 0;
  /** mirror table as last received; only sent back when indices unchanged */
  serverMirror: number[] = [];
  private baseline = "";
  private undoStack: Snapshot[] = [];
  private redoStack: Snapshot[] = [];

  static fromServer(
    doc: KeypointSetDoc,
    uvOf: (vertex: number) => [number, number],
  ): EditorState {
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

  private payloadKey(): string {
    return JSON.stringify(
      this.points.map((p) => [p.vertex, p.provenance, p.uvHint]),
    );
  }

  get dirty(): boolean {
    return this.payloadKey() !== this.baseline;
  }

  get canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  get canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  /** Adopt the current payload as the server-acknowledged version. */
  markSaved(version: number): void {
    this.version = version;
    this.baseline = this.payloadKey();
    for (const p of this.points) p.uvHint = null;
    this.baseline = this.payloadKey();
  }

  private snapshot(): Snapshot {
    return {
      points: this.points.map((p) => ({
        ...p,
        uv: [...p.uv] as [number, number],
        uvHint: p.uvHint ? ([...p.uvHint] as [number, number]) : null,
      })),
    };
  }

  private restore(snap: Snapshot): void {
    this.points = snap.points.map((p) => ({
      ...p,
      uv: [...p.uv] as [number, number],
      uvHint: p.uvHint ? ([...p.uvHint] as [number, number]) : null,
    }));
    if (this.selection !== null && this.selection >= this.points.length)
      this.selection = this.points.length ? this.points.length - 1 : null;
  }

  private beginEdit(): Snapshot {
    return this.snapshot();
  }

  private commitEdit(before: Snapshot): void {
    this.undoStack.push(before);
    this.redoStack = [];
  }

  select(ordinal: number | null): void {
    this.selection = ordinal;
  }

  private vertexTaken(vertex: number, exceptOrdinal: number | null): boolean {
    return this.points.some(
      (p, k) => p.vertex === vertex && k !== exceptOrdinal,
    );
  }

  /** Move the selected keypoint onto a (snapped) vertex. */
  move(ordinal: number, vertex: number, uv: [number, number]): EditResult {
    const point = this.points[ordinal];
    if (!point) return { ok: false, reason: `no keypoint ${ordinal}` };
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

  add(vertex: number, uv: [number, number]): EditResult {
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
  remove(): EditResult {
    if (this.selection === null)
      return { ok: false, reason: "select a keypoint to delete" };
    const before = this.beginEdit();
    this.points.splice(this.selection, 1);
    this.selection = null;
    this.commitEdit(before);
    return { ok: true };
  }

  undo(): boolean {
    const snap = this.undoStack.pop();
    if (!snap) return false;
    this.redoStack.push(this.snapshot());
    this.restore(snap);
    return true;
  }

  redo(): boolean {
    const snap = this.redoStack.pop();
    if (!snap) return false;
    this.undoStack.push(this.snapshot());
    this.restore(snap);
    return true;
  }

  /** Counters for the provenance legend. */
  provenanceCounts(): Map<string, number> {
    const counts = new Map<string, number>();
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
  toPutBody(): KeypointSetPut {
    const indices = this.points.map((p) => p.vertex);
    const body: KeypointSetPut = {
      version: this.version,
      templateVertexCount: this.templateVertexCount,
      indices,
      provenance: this.points.map((p) => p.provenance),
    };
    const sameIndices =
      indices.length === this.serverMirror.length &&
      this.baselineIndices().every((v, k) => v === indices[k]);
    if (sameIndices) body.mirror = [...this.serverMirror];
    if (this.points.some((p) => p.uvHint))
      body.uv = this.points.map((p) => p.uvHint);
    return body;
  }

  private baselineIndices(): number[] {
    if (!this.baseline) return [];
    const rows = JSON.parse(this.baseline) as [number, string, unknown][];
    return rows.map((r) => r[0]);
  }

  /** Exact-equality key over the undoable payload (selection excluded). */
  stateKey(): string {
    return JSON.stringify(
      this.points.map((p) => [p.vertex, p.provenance, p.uv, p.uvHint]),
    );
  }
}
