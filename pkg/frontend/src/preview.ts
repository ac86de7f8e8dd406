/** Plot series for the preview panel.
 * Thin-client rule: series are the server's numbers verbatim; breakpoints,
 * histogram bars, and KDE samples pass through with no recomputation. */

import type { PartitionDoc, SummaryDoc } from './types';

export interface LineSeries {
  label: string;
  xs: number[];
  ys: number[];
}

export interface BarSeries {
  edges: number[];
  counts: number[];
}

export interface PreviewModel {
  classCurves: LineSeries[];
  histogram: BarSeries | null;
  kde: LineSeries | null;
  cores: { label: string; range: [number, number] }[];
}

export function partitionCurves(partition: PartitionDoc): LineSeries[] {
  return partition.classes.map((cls) => ({
    label: cls.label,
    xs: cls.breakpoints.map((p) => p[0]),
    ys: cls.breakpoints.map((p) => p[1]),
  }));
}

export function buildPreview(
  partition: PartitionDoc | null,
  summary: SummaryDoc | null,
): PreviewModel {
  return {
    classCurves: partition ? partitionCurves(partition) : [],
    histogram: summary
      ? { edges: summary.histogram.bin_edges, counts: summary.histogram.counts }
      : null,
    kde: summary ? { label: 'kde', xs: summary.kde.x, ys: summary.kde.density } : null,
    cores: partition
      ? partition.classes.map((cls) => ({ label: cls.label, range: cls.core }))
      : [],
  };
}
