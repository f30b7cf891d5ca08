import * as fs from 'node:fs';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';
import {
  GridMap,
  PlotError,
  TrajectoryPoint,
  parseMap,
  parseTrajectoryCsv,
  renderTrajectory,
} from '../src/index.js';

const FIXTURES = fileURLToPath(new URL('../fixtures', import.meta.url));

function fixtureMap(): GridMap {
  return parseMap(fs.readFileSync(path.join(FIXTURES, 'bridge_15x15_b.map'), 'utf8'), 'b.map');
}

function fixtureTraj(name: string): TrajectoryPoint[] {
  return parseTrajectoryCsv(fs.readFileSync(path.join(FIXTURES, `${name}.csv`), 'utf8'), name);
}

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe('renderTrajectory', () => {
  const trajs = () => [
    { name: 'traj_mprm', points: fixtureTraj('traj_mprm') },
    { name: 'traj_pop0', points: fixtureTraj('traj_pop0') },
  ];

  it('draws every map cell exactly once', () => {
    const svg = renderTrajectory(fixtureMap(), trajs());
    expect(count(svg, 'class="cell"')).toBe(15 * 15);
    expect(count(svg, 'data-glyph="#"')).toBe(68);
    expect(count(svg, 'data-glyph="."')).toBe(152);
    for (const glyph of ['T', 'G', 'I', 'S', 'F']) {
      expect(count(svg, `data-glyph="${glyph}"`)).toBe(1);
    }
  });

  it('overlays one route, start marker, and end marker per trajectory', () => {
    const svg = renderTrajectory(fixtureMap(), trajs());
    expect(count(svg, 'class="traj"')).toBe(2);
    expect(count(svg, 'class="route"')).toBe(2);
    expect(count(svg, 'class="start-marker"')).toBe(2);
    expect(count(svg, 'class="end-marker"')).toBe(2);
    expect(svg).toContain('data-traj="traj_mprm"');
    expect(svg).toContain('data-traj="traj_pop0"');
  });

  it('puts the step count of each route in the legend', () => {
    const svg = renderTrajectory(fixtureMap(), trajs());
    expect(svg).toContain('>traj_mprm (15 steps)</text>');
    expect(svg).toContain('>traj_pop0 (19 steps)</text>');
  });

  it('is byte-identical across renders', () => {
    expect(renderTrajectory(fixtureMap(), trajs())).toBe(renderTrajectory(fixtureMap(), trajs()));
  });

  it('draws only a start marker for a single-point trajectory', () => {
    const single = [{ name: 'stuck', points: [{ t: 0, x: 2, y: 2, rm_state_id: 0 }] }];
    const svg = renderTrajectory(fixtureMap(), single);
    expect(count(svg, 'class="start-marker"')).toBe(1);
    expect(count(svg, 'class="route"')).toBe(0);
    expect(count(svg, 'class="end-marker"')).toBe(0);
    expect(svg).toContain('>stuck (0 steps)</text>');
  });

  it('rejects a point outside the map', () => {
    const bad = [{ name: 'oob', points: [{ t: 0, x: 15, y: 2, rm_state_id: 0 }] }];
    expect(() => renderTrajectory(fixtureMap(), bad)).toThrow(PlotError);
    expect(() => renderTrajectory(fixtureMap(), bad)).toThrow(
      /oob: point \(15,2\) at t=0 is outside the 15x15 map/,
    );
  });

  it('rejects an empty trajectory list', () => {
    expect(() => renderTrajectory(fixtureMap(), [])).toThrow(/no trajectories/);
  });

  it('scales cells down for large maps and up for small ones', () => {
    const small = parseMap('starts: (1,1)\n###\n#.#\n###\n', 'small.map');
    const svgSmall = renderTrajectory(small, [
      { name: 'a', points: [{ t: 0, x: 1, y: 1, rm_state_id: 0 }] },
    ]);
    // 3x3 map: 560/3 clamps to the 36px maximum
    expect(svgSmall).toContain('width="36" height="36"');
    const wide = parseMap(`starts: (1,1)\n${'#'.repeat(80)}\n${'#'.repeat(80)}\n`, 'wide.map');
    const svgWide = renderTrajectory(wide, [
      { name: 'a', points: [{ t: 0, x: 0, y: 0, rm_state_id: 0 }] },
    ]);
    // 80-wide map: 560/80 = 7 clamps to the 8px minimum
    expect(svgWide).toContain('width="8" height="8"');
  });
});
