/** Wire formats of the densemark serve API. */

export interface TemplatePayload {
  vertexCount: number;
  /** true vertex index of each transported point */
  indices: number[];
  /** matching UV coordinates, decimated to <= 10k points */
  uv: [number, number][];
}

export interface KeypointSetDoc {
  version: number;
  templateVertexCount: number;
  indices: number[];
  mirror: number[];
  provenance: string[];
  schemaVersion?: number;
}

/** PUT body: keypoint set plus optional per-ordinal re-snap hints. */
export interface KeypointSetPut {
  version: number;
  templateVertexCount: number;
  indices: number[];
  provenance: string[];
  mirror?: number[];
  uv?: ([number, number] | null)[];
}

export interface ApiError {
  error: { message: string; invariant?: string };
}

export const PROVENANCE_TAGS = [
  "seed-jaw",
  "seed-nose",
  "centroid-iter1",
  "centroid-iter2",
  "centroid-iter3",
  "manual",
] as const;

export const PROVENANCE_COLORS: Record<string, string> = {
  "seed-jaw": "#d62728",
  "seed-nose": "#9467bd",
  "centroid-iter1": "#1f77b4",
  "centroid-iter2": "#2ca02c",
  "centroid-iter3": "#17becf",
  manual: "#ff7f0e",
};

export function provenanceColor(tag: string): string {
  return PROVENANCE_COLORS[tag] ?? "#7f7f7f";
}
