/** Turn verified findings into highlight ranges for the document viewer.
 *
 * Only findings whose quote was verified against the body get a range;
 * fabricated or leaked quotes are badge-only so the viewer never marks
 * text that is not actually there.
 */

import type { FindingEntry } from "./types.js";

export interface HighlightRange {
  start: number;
  end: number;
  findingIndex: number;
}

export interface HighlightResult {
  ranges: HighlightRange[];
  warnings: string[];
}

export function computeHighlights(
  docTextLength: number,
  findings: FindingEntry[],
): HighlightResult {
  const ranges: HighlightRange[] = [];
  const warnings: string[] = [];
  for (const finding of findings) {
    const v = finding.verification;
    if (!v || v.status !== "verified") continue;
    if (v.start === null || v.end === null || v.start > v.end) {
      warnings.push(`finding ${finding.finding_ref}: verified without a usable span`);
      continue;
    }
    const start = Math.max(0, v.start);
    const end = Math.min(docTextLength, v.end);
    if (start >= end) {
      warnings.push(
        `finding ${finding.finding_ref}: span (${v.start}, ${v.end}) ` +
          `lies outside the ${docTextLength}-char document`,
      );
      continue;
    }
    if (start !== v.start || end !== v.end) {
      warnings.push(`finding ${finding.finding_ref}: span clipped to (${start}, ${end})`);
    }
    ranges.push({ start, end, findingIndex: finding.index });
  }
  ranges.sort((a, b) => a.start - b.start || a.end - b.end || a.findingIndex - b.findingIndex);
  for (const message of warnings) console.warn(message);
  return { ranges, warnings };
}

export interface BodySegment {
  start: number;
  end: number;
  /** Finding indices covering this segment; empty for plain text. */
  covering: number[];
}

/** Split [0, length) at every range boundary so overlapping highlights can
 * be layered: each segment knows every finding covering it. */
export function segmentBody(length: number, ranges: HighlightRange[]): BodySegment[] {
  const cuts = new Set<number>([0, length]);
  for (const r of ranges) {
    cuts.add(r.start);
    cuts.add(r.end);
  }
  const points = [...cuts].filter((p) => p >= 0 && p <= length).sort((a, b) => a - b);
  const segments: BodySegment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const start = points[i]!;
    const end = points[i + 1]!;
    if (start >= end) continue;
    const covering = ranges
      .filter((r) => r.start <= start && r.end >= end)
      .map((r) => r.findingIndex);
    segments.push({ start, end, covering });
  }
  return segments;
}
