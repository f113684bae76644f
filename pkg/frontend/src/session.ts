import { ApiClient, SaveOutcome } from "./api.js";
import { snapToVertex } from "./snap.js";
import { EditorState } from "./state.js";
import type { TemplatePayload } from "./types.js";

export interface Session {
  template: TemplatePayload;
  state: EditorState;
  /** vertex index -> UV, over the decimated cloud */
  uvOf: (vertex: number) => [number, number];
}

/**
 * Fetch template and keypoint set and assemble the editor state.
 * Keypoints whose vertex is missing from the decimated cloud get the UV of
 * the nearest transported vertex, which is visually indistinguishable at
 * screen scale.
 */
export async function loadSession(api: ApiClient): Promise<Session> {
  const [template, doc] = await Promise.all([
    api.getTemplate(),
    api.getKeypointSet(),
  ]);
  const byVertex = new Map<number, [number, number]>();
  template.indices.forEach((vertex, k) => {
    byVertex.set(vertex, template.uv[k]!);
  });
  const sortedVertices = [...byVertex.keys()].sort((a, b) => a - b);
  const uvOf = (vertex: number): [number, number] => {
    const exact = byVertex.get(vertex);
    if (exact) return [exact[0], exact[1]];
    // nearest transported vertex by index (cloud is an even stride)
    let lo = 0;
    let hi = sortedVertices.length - 1;
    while (lo < hi) {
      const mid = (lo + hi) >> 1;
      if (sortedVertices[mid]! < vertex) lo = mid + 1;
      else hi = mid;
    }
    const candidates = [sortedVertices[lo]!, sortedVertices[Math.max(0, lo - 1)]!];
    const best = candidates.reduce((a, b) =>
      Math.abs(a - vertex) <= Math.abs(b - vertex) ? a : b,
    );
    const uv = byVertex.get(best)!;
    return [uv[0], uv[1]];
  };
  const state = EditorState.fromServer(doc, uvOf);
  return { template, state, uvOf };
}

export type SaveResult = SaveOutcome & { offendingOrdinal?: number };

/**
 * PUT the edited set. On success the state adopts the server's answer
 * (authoritative re-snaps, provenance, fresh mirror table and version).
 * On 422 the offending ordinal is located from the invariant message when
 * possible; on failure of any kind the local state is retained untouched.
 */
export async function saveSession(
  api: ApiClient,
  session: Session,
): Promise<SaveResult> {
  const { state } = session;
  const outcome = await api.putKeypointSet(state.toPutBody());
  if (outcome.status === "saved") {
    const fresh = EditorState.fromServer(outcome.doc, session.uvOf);
    fresh.select(
      state.selection !== null && state.selection < fresh.points.length
        ? state.selection
        : null,
    );
    session.state = fresh;
    return outcome;
  }
  if (outcome.status === "invalid") {
    return { ...outcome, offendingOrdinal: findOffender(state, outcome) };
  }
  return outcome;
}

function findOffender(
  state: EditorState,
  outcome: { invariant?: string },
): number | undefined {
  if (outcome.invariant === "indices unique") {
    const seen = new Map<number, number>();
    for (let k = 0; k < state.points.length; k++) {
      const v = state.points[k]!.vertex;
      if (seen.has(v)) return k;
      seen.set(v, k);
    }
  }
  if (outcome.invariant === "indices in range") {
    for (let k = 0; k < state.points.length; k++) {
      const v = state.points[k]!.vertex;
      if (v < 0 || v >= state.templateVertexCount) return k;
    }
  }
  return undefined;
}

/** Snap helper shared by click-to-add and drag-to-move interactions. */
export function snapForEdit(
  session: Session,
  u: number,
  v: number,
): { vertex: number; uv: [number, number] } {
  const hit = snapToVertex(u, v, session.template);
  const uv = session.template.uv[hit.cloudOrdinal]!;
  return { vertex: hit.vertex, uv: [uv[0], uv[1]] };
}
