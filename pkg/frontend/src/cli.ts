#!/usr/bin/env node
/**
 * plot — render figures from popmachine experiment CSVs.
 *
 *   plot curves --agg <dir-or-csv> --out fig.svg [--scale raw|millions]
 *               [--title T] [--x-label L] [--y-label L]
 *   plot traj   --map m.map --traj a.csv [--traj b.csv ...] --out fig.svg
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import { pathToFileURL } from 'node:url';
import { parseArgs } from 'node:util';
import { AggregateRow, groupFamilies, parseAggregateCsv, parseTrajectoryCsv } from './csv.js';
import { renderCurves, XScale } from './curves.js';
import { PlotError } from './errors.js';
import { parseMap } from './map.js';
import { renderTrajectory } from './traj.js';

const USAGE = `usage:
  plot curves --agg <dir-or-csv> --out fig.svg [--scale raw|millions] [--title T]
  plot traj   --map m.map --traj a.csv [--traj b.csv ...] --out fig.svg`;

function collectAggregateRows(aggPath: string): AggregateRow[] {
  const stat = fs.statSync(aggPath, { throwIfNoEntry: false });
  if (stat === undefined) {
    throw new PlotError(`no such file or directory: ${aggPath}`);
  }
  if (stat.isFile()) {
    return parseAggregateCsv(fs.readFileSync(aggPath, 'utf8'), path.basename(aggPath));
  }
  const names = fs
    .readdirSync(aggPath)
    .filter((name) => name.includes('__aggregate__') && name.endsWith('.csv'))
    .sort();
  if (names.length === 0) {
    throw new PlotError(`no aggregate CSVs (*__aggregate__*.csv) under ${aggPath}`);
  }
  return names.flatMap((name) =>
    parseAggregateCsv(fs.readFileSync(path.join(aggPath, name), 'utf8'), name),
  );
}

function cmdCurves(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      agg: { type: 'string' },
      out: { type: 'string' },
      scale: { type: 'string', default: 'raw' },
      title: { type: 'string' },
      'x-label': { type: 'string' },
      'y-label': { type: 'string' },
    },
  });
  if (values.agg === undefined || values.out === undefined) {
    throw new PlotError(`curves needs --agg and --out\n${USAGE}`);
  }
  if (values.scale !== 'raw' && values.scale !== 'millions') {
    throw new PlotError(`--scale must be 'raw' or 'millions', got '${values.scale}'`);
  }
  const series = groupFamilies(collectAggregateRows(values.agg));
  const svg = renderCurves({
    series,
    scale: values.scale as XScale,
    title: values.title,
    xLabel: values['x-label'],
    yLabel: values['y-label'],
  });
  fs.writeFileSync(values.out, svg);
  console.log(`wrote ${values.out} (${series.length} families)`);
  return 0;
}

function cmdTraj(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      map: { type: 'string' },
      traj: { type: 'string', multiple: true },
      out: { type: 'string' },
    },
  });
  if (values.map === undefined || values.out === undefined || (values.traj ?? []).length === 0) {
    throw new PlotError(`traj needs --map, --out, and at least one --traj\n${USAGE}`);
  }
  const map = parseMap(fs.readFileSync(values.map, 'utf8'), path.basename(values.map));
  const trajs = (values.traj ?? []).map((file) => ({
    name: path.basename(file).replace(/\.csv$/, ''),
    points: parseTrajectoryCsv(fs.readFileSync(file, 'utf8'), path.basename(file)),
  }));
  fs.writeFileSync(values.out, renderTrajectory(map, trajs));
  console.log(`wrote ${values.out} (${trajs.length} trajectories)`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === 'curves') {
      return cmdCurves(rest);
    }
    if (command === 'traj') {
      return cmdTraj(rest);
    }
    throw new PlotError(`unknown command '${command ?? ''}'\n${USAGE}`);
  } catch (err) {
    if (err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
