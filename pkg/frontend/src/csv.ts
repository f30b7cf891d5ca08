/**
 * Readers for the two harness CSV schemas.
 *
 * Aggregate CSV:  train_step,family,p25,p50,p75   (one row per family per step)
 * Trajectory CSV: t,x,y,rm_state_id               (one row per step, t from 0)
 */

import Papa from 'papaparse';
import { PlotError } from './errors.js';

export interface AggregateRow {
  train_step: number;
  family: string;
  p25: number;
  p50: number;
  p75: number;
}

export interface TrajectoryPoint {
  t: number;
  x: number;
  y: number;
  rm_state_id: number;
}

/** One family's aligned percentile series. */
export interface FamilySeries {
  family: string;
  steps: number[];
  p25: number[];
  p50: number[];
  p75: number[];
}

const AGGREGATE_HEADER = ['train_step', 'family', 'p25', 'p50', 'p75'];
const TRAJECTORY_HEADER = ['t', 'x', 'y', 'rm_state_id'];

function parseRows(text: string, source: string, header: string[]): Record<string, unknown>[] {
  const parsed = Papa.parse<Record<string, unknown>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new PlotError(`${source}: ${first.message} (row ${first.row ?? '?'})`);
  }
  const fields = parsed.meta.fields ?? [];
  if (fields.join(',') !== header.join(',')) {
    throw new PlotError(
      `${source}: expected header '${header.join(',')}', got '${fields.join(',')}'`,
    );
  }
  return parsed.data;
}

function asNumber(row: Record<string, unknown>, key: string, source: string): number {
  const v = row[key];
  if (typeof v !== 'number' || !Number.isFinite(v)) {
    throw new PlotError(`${source}: non-numeric value ${JSON.stringify(v)} in column '${key}'`);
  }
  return v;
}

export function parseAggregateCsv(text: string, source: string): AggregateRow[] {
  const rows = parseRows(text, source, AGGREGATE_HEADER).map((row) => ({
    train_step: asNumber(row, 'train_step', source),
    family: String(row.family ?? ''),
    p25: asNumber(row, 'p25', source),
    p50: asNumber(row, 'p50', source),
    p75: asNumber(row, 'p75', source),
  }));
  if (rows.length === 0) {
    throw new PlotError(`${source}: no data rows`);
  }
  for (const row of rows) {
    if (!(row.p25 <= row.p50 && row.p50 <= row.p75)) {
      throw new PlotError(
        `${source}: percentiles out of order at step ${row.train_step} (${row.family})`,
      );
    }
  }
  return rows;
}

export function parseTrajectoryCsv(text: string, source: string): TrajectoryPoint[] {
  const rows = parseRows(text, source, TRAJECTORY_HEADER).map((row) => ({
    t: asNumber(row, 't', source),
    x: asNumber(row, 'x', source),
    y: asNumber(row, 'y', source),
    rm_state_id: asNumber(row, 'rm_state_id', source),
  }));
  if (rows.length === 0) {
    throw new PlotError(`${source}: no data rows`);
  }
  rows.forEach((row, i) => {
    if (row.t !== i) {
      throw new PlotError(`${source}: expected t=${i} at row ${i + 1}, got t=${row.t}`);
    }
  });
  return rows;
}

/** The canonical legend order; families beyond these follow alphabetically. */
const FAMILY_ORDER = ['QRM-MPRM', 'Aggregated-QRM-POP', 'Aggregated-QRM-Seq'];

function familyRank(family: string): [number, string] {
  const i = FAMILY_ORDER.indexOf(family);
  return [i === -1 ? FAMILY_ORDER.length : i, family];
}

/**
 * Group aggregate rows into per-family series, enforcing that every family
 * sits on the same evaluation-step grid.
 */
export function groupFamilies(rows: AggregateRow[]): FamilySeries[] {
  const byFamily = new Map<string, AggregateRow[]>();
  for (const row of rows) {
    const bucket = byFamily.get(row.family);
    if (bucket === undefined) {
      byFamily.set(row.family, [row]);
    } else {
      bucket.push(row);
    }
  }
  const families = [...byFamily.keys()].sort((a, b) => {
    const [ra, na] = familyRank(a);
    const [rb, nb] = familyRank(b);
    return ra - rb || (na < nb ? -1 : na > nb ? 1 : 0);
  });
  const series = families.map((family) => {
    const sorted = [...byFamily.get(family)!].sort((a, b) => a.train_step - b.train_step);
    return {
      family,
      steps: sorted.map((r) => r.train_step),
      p25: sorted.map((r) => r.p25),
      p50: sorted.map((r) => r.p50),
      p75: sorted.map((r) => r.p75),
    };
  });
  const grid = JSON.stringify(series[0]!.steps);
  for (const s of series) {
    if (JSON.stringify(s.steps) !== grid) {
      throw new PlotError(
        `family '${s.family}' is on a different evaluation-step grid than '${series[0]!.family}'`,
      );
    }
  }
  return series;
}
