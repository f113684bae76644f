/** Wire formats of the densemark serve API. */
export const PROVENANCE_TAGS = [
    "seed-jaw",
    "seed-nose",
    "centroid-iter1",
    "centroid-iter2",
    "centroid-iter3",
    "manual",
];
export const PROVENANCE_COLORS = {
    "seed-jaw": "#d62728",
    "seed-nose": "#9467bd",
    "centroid-iter1": "#1f77b4",
    "centroid-iter2": "#2ca02c",
    "centroid-iter3": "#17becf",
    manual: "#ff7f0e",
};
export function provenanceColor(tag) {
    return PROVENANCE_COLORS[tag] ?? "#7f7f7f";
}
