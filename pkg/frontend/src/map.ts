/**
 * Reader for the ASCII map format: a `starts: (x,y) ...` header line
 * followed by a rectangular glyph grid; `;` lines are comments.
 */

import { PlotError } from './errors.js';

export const GLYPHS: Record<string, string> = {
  '.': 'empty',
  '#': 'wall',
  T: 'wood',
  G: 'grass',
  I: 'iron',
  o: 'gold',
  m: 'gem',
  F: 'factory',
  S: 'toolshed',
  W: 'workbench',
};

export interface GridMap {
  width: number;
  height: number;
  /** cells[y][x] is the glyph character. */
  cells: string[][];
  evalStarts: [number, number][];
}

export function parseMap(text: string, source: string): GridMap {
  const lines = text
    .split('\n')
    .map((line) => line.trimEnd())
    .filter((line) => line.trim() !== '' && !line.trimStart().startsWith(';'));
  if (lines.length === 0) {
    throw new PlotError(`${source}: empty map file`);
  }
  const header = lines[0]!;
  if (!header.trimStart().startsWith('starts:')) {
    throw new PlotError(`${source}: expected a 'starts: (x,y) ...' header`);
  }
  const evalStarts: [number, number][] = [];
  for (const token of header.trim().slice('starts:'.length).trim().split(/\s+/)) {
    if (token === '') continue;
    const m = /^\((\d+),(\d+)\)$/.exec(token);
    if (!m) {
      throw new PlotError(`${source}: malformed start coordinate '${token}'`);
    }
    evalStarts.push([Number(m[1]), Number(m[2])]);
  }
  const rows = lines.slice(1);
  if (rows.length === 0) {
    throw new PlotError(`${source}: map has no grid rows`);
  }
  const width = rows[0]!.length;
  const cells = rows.map((row, y) => {
    if (row.length !== width) {
      throw new PlotError(`${source}: row ${y} has width ${row.length}, expected ${width}`);
    }
    return [...row].map((ch, x) => {
      if (!(ch in GLYPHS)) {
        throw new PlotError(`${source}: unknown glyph '${ch}' at row ${y}, column ${x}`);
      }
      return ch;
    });
  });
  return { width, height: rows.length, cells, evalStarts };
}
