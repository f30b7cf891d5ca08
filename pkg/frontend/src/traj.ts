/**
 * Trajectory overlay: the map drawn as a colored grid with one route per
 * agent and step counts in the legend.
 */

import { TrajectoryPoint } from './csv.js';
import { PlotError } from './errors.js';
import { GridMap } from './map.js';
import { fmt, svgDocument, tag, text } from './svg.js';

export interface TrajectorySpec {
  /** Legend name, typically the CSV file's basename. */
  name: string;
  points: TrajectoryPoint[];
}

const CELL_FILL: Record<string, string> = {
  '.': '#ffffff',
  '#': '#3d3d3d',
  T: '#b08968',
  G: '#74c476',
  I: '#9ecae1',
  o: '#f2cc0c',
  m: '#ab47bc',
  F: '#e07a5f',
  S: '#f4a261',
  W: '#a1887f',
};

const ROUTE_COLORS = ['#d62728', '#1f77b4', '#2ca02c', '#9467bd'];

export function renderTrajectory(map: GridMap, trajs: TrajectorySpec[]): string {
  if (trajs.length === 0) {
    throw new PlotError('no trajectories to plot');
  }
  for (const traj of trajs) {
    for (const p of traj.points) {
      if (p.x < 0 || p.x >= map.width || p.y < 0 || p.y >= map.height) {
        throw new PlotError(
          `${traj.name}: point (${p.x},${p.y}) at t=${p.t} is outside the ` +
            `${map.width}x${map.height} map`,
        );
      }
    }
  }

  const cell = Math.max(8, Math.min(36, Math.floor(560 / Math.max(map.width, map.height))));
  const pad = 10;
  const legendH = 8 + trajs.length * 18;
  const width = map.width * cell + 2 * pad;
  const height = map.height * cell + 2 * pad + legendH;

  const body: string[] = [];
  body.push(tag('rect', { x: 0, y: 0, width, height, fill: '#ffffff' }));

  // the map grid, resource cells labeled with their glyph
  const cells: string[] = [];
  for (let y = 0; y < map.height; y += 1) {
    for (let x = 0; x < map.width; x += 1) {
      const glyph = map.cells[y]![x]!;
      cells.push(
        tag('rect', {
          class: 'cell',
          'data-glyph': glyph,
          x: pad + x * cell,
          y: pad + y * cell,
          width: cell,
          height: cell,
          fill: CELL_FILL[glyph]!,
          stroke: '#cccccc',
          'stroke-width': 0.5,
        }),
      );
      if (glyph !== '.' && glyph !== '#') {
        cells.push(
          text(pad + (x + 0.5) * cell, pad + (y + 0.5) * cell, glyph, {
            'font-size': cell * 0.55,
            'text-anchor': 'middle',
            'dominant-baseline': 'central',
            fill: '#1a1a1a',
          }),
        );
      }
    }
  }
  body.push(tag('g', { class: 'grid' }, cells.join('')));

  // routes, slightly offset from each other so overlaps stay visible
  trajs.forEach((traj, ti) => {
    const color = ROUTE_COLORS[ti % ROUTE_COLORS.length]!;
    const off = (ti - (trajs.length - 1) / 2) * cell * 0.14;
    const cx = (p: TrajectoryPoint): number => pad + (p.x + 0.5) * cell + off;
    const cy = (p: TrajectoryPoint): number => pad + (p.y + 0.5) * cell + off;
    const pieces: string[] = [];
    if (traj.points.length > 1) {
      const d = traj.points
        .map((p, i) => `${i === 0 ? 'M' : 'L'}${fmt(cx(p))},${fmt(cy(p))}`)
        .join('');
      pieces.push(
        tag('path', {
          class: 'route',
          d,
          fill: 'none',
          stroke: color,
          'stroke-width': cell * 0.18,
          'stroke-opacity': 0.85,
          'stroke-linecap': 'round',
          'stroke-linejoin': 'round',
        }),
      );
    }
    const first = traj.points[0]!;
    const last = traj.points[traj.points.length - 1]!;
    pieces.push(
      tag('circle', {
        class: 'start-marker',
        cx: cx(first),
        cy: cy(first),
        r: cell * 0.22,
        fill: color,
      }),
    );
    if (traj.points.length > 1) {
      pieces.push(
        tag('circle', {
          class: 'end-marker',
          cx: cx(last),
          cy: cy(last),
          r: cell * 0.22,
          fill: '#ffffff',
          stroke: color,
          'stroke-width': 2,
        }),
      );
    }
    body.push(tag('g', { class: 'traj', 'data-traj': traj.name }, pieces.join('')));
  });

  // legend with the step count of each route
  const legendItems = trajs.map((traj, ti) => {
    const color = ROUTE_COLORS[ti % ROUTE_COLORS.length]!;
    const ly = map.height * cell + 2 * pad + 12 + ti * 18;
    const steps = traj.points[traj.points.length - 1]!.t;
    return (
      tag('line', {
        x1: pad + 2,
        x2: pad + 26,
        y1: ly - 4,
        y2: ly - 4,
        stroke: color,
        'stroke-width': 3,
        'stroke-linecap': 'round',
      }) +
      text(pad + 32, ly, `${traj.name} (${steps} steps)`, {
        class: 'legend-label',
        'font-size': 12,
        fill: '#1a1a1a',
      })
    );
  });
  body.push(tag('g', { class: 'legend' }, legendItems.join('')));

  return svgDocument(width, height, body);
}
