import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';
import { main } from '../src/index.js';

const FIXTURES = fileURLToPath(new URL('../fixtures', import.meta.url));
const MAP = path.join(FIXTURES, 'bridge_15x15_b.map');
const TRAJ_A = path.join(FIXTURES, 'traj_mprm.csv');
const TRAJ_B = path.join(FIXTURES, 'traj_pop0.csv');

let tmp: string;
let logs: string[];
let errors: string[];

beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'plotkit-'));
  logs = [];
  errors = [];
  vi.spyOn(console, 'log').mockImplementation((msg) => logs.push(String(msg)));
  vi.spyOn(console, 'error').mockImplementation((msg) => errors.push(String(msg)));
});

afterEach(() => {
  vi.restoreAllMocks();
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe('plot curves', () => {
  it('renders a figure from a directory of aggregate CSVs', () => {
    const out = path.join(tmp, 'curves.svg');
    expect(main(['curves', '--agg', FIXTURES, '--out', out])).toBe(0);
    expect(logs).toEqual([`wrote ${out} (3 families)`]);
    const svg = fs.readFileSync(out, 'utf8');
    expect(svg).toContain('data-family="QRM-MPRM"');
    expect(svg).toContain('data-family="Aggregated-QRM-POP"');
    expect(svg).toContain('data-family="Aggregated-QRM-Seq"');
  });

  it('renders a figure from a single CSV file', () => {
    const out = path.join(tmp, 'one.svg');
    const agg = path.join(FIXTURES, 'bridge__aggregate__QRM-MPRM.csv');
    expect(main(['curves', '--agg', agg, '--out', out])).toBe(0);
    expect(fs.readFileSync(out, 'utf8')).toContain('data-family="QRM-MPRM"');
  });

  it('writes byte-identical output across invocations', () => {
    const outA = path.join(tmp, 'a.svg');
    const outB = path.join(tmp, 'b.svg');
    expect(main(['curves', '--agg', FIXTURES, '--out', outA, '--title', 'bridge'])).toBe(0);
    expect(main(['curves', '--agg', FIXTURES, '--out', outB, '--title', 'bridge'])).toBe(0);
    expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
  });

  it('passes scale and label flags through', () => {
    const out = path.join(tmp, 'curves.svg');
    const code = main([
      'curves',
      '--agg',
      FIXTURES,
      '--out',
      out,
      '--scale',
      'millions',
      '--y-label',
      'median return',
    ]);
    expect(code).toBe(0);
    const svg = fs.readFileSync(out, 'utf8');
    expect(svg).toContain('>training steps (millions)</text>');
    expect(svg).toContain('>median return</text>');
  });

  it('fails on a missing --agg path', () => {
    expect(main(['curves', '--agg', path.join(tmp, 'nope'), '--out', 'x.svg'])).toBe(1);
    expect(errors[0]).toMatch(/^error: no such file or directory/);
  });

  it('fails on a directory without aggregate CSVs', () => {
    expect(main(['curves', '--agg', tmp, '--out', 'x.svg'])).toBe(1);
    expect(errors[0]).toMatch(/no aggregate CSVs \(\*__aggregate__\*\.csv\)/);
  });

  it('fails on mismatched evaluation grids', () => {
    fs.writeFileSync(
      path.join(tmp, 'x__aggregate__A.csv'),
      'train_step,family,p25,p50,p75\n10,A,-3,-2,-1\n',
    );
    fs.writeFileSync(
      path.join(tmp, 'x__aggregate__B.csv'),
      'train_step,family,p25,p50,p75\n20,B,-3,-2,-1\n',
    );
    expect(main(['curves', '--agg', tmp, '--out', path.join(tmp, 'x.svg')])).toBe(1);
    expect(errors[0]).toMatch(/different evaluation-step grid/);
  });

  it('fails on a bad --scale value', () => {
    expect(main(['curves', '--agg', FIXTURES, '--out', 'x.svg', '--scale', 'log'])).toBe(1);
    expect(errors[0]).toMatch(/--scale must be 'raw' or 'millions'/);
  });

  it('fails when --agg or --out is missing', () => {
    expect(main(['curves', '--agg', FIXTURES])).toBe(1);
    expect(errors[0]).toMatch(/curves needs --agg and --out/);
  });
});

describe('plot traj', () => {
  it('renders two overlaid trajectories', () => {
    const out = path.join(tmp, 'traj.svg');
    const code = main(['traj', '--map', MAP, '--traj', TRAJ_A, '--traj', TRAJ_B, '--out', out]);
    expect(code).toBe(0);
    expect(logs).toEqual([`wrote ${out} (2 trajectories)`]);
    const svg = fs.readFileSync(out, 'utf8');
    expect(svg).toContain('data-traj="traj_mprm"');
    expect(svg).toContain('data-traj="traj_pop0"');
    expect(svg).toContain('>traj_mprm (15 steps)</text>');
    expect(svg).toContain('>traj_pop0 (19 steps)</text>');
  });

  it('names each route after the CSV basename', () => {
    const renamed = path.join(tmp, 'factory route.csv');
    fs.copyFileSync(TRAJ_A, renamed);
    const out = path.join(tmp, 'traj.svg');
    expect(main(['traj', '--map', MAP, '--traj', renamed, '--out', out])).toBe(0);
    expect(fs.readFileSync(out, 'utf8')).toContain('data-traj="factory route"');
  });

  it('fails on a trajectory that leaves the map', () => {
    const bad = path.join(tmp, 'oob.csv');
    fs.writeFileSync(bad, 't,x,y,rm_state_id\n0,99,2,0\n');
    expect(main(['traj', '--map', MAP, '--traj', bad, '--out', path.join(tmp, 'x.svg')])).toBe(1);
    expect(errors[0]).toMatch(/point \(99,2\) at t=0 is outside the 15x15 map/);
  });

  it('fails when required flags are missing', () => {
    expect(main(['traj', '--map', MAP, '--out', 'x.svg'])).toBe(1);
    expect(errors[0]).toMatch(/traj needs --map, --out, and at least one --traj/);
  });
});

describe('plot (dispatch)', () => {
  it('fails on an unknown command', () => {
    expect(main(['zap'])).toBe(1);
    expect(errors[0]).toMatch(/unknown command 'zap'/);
    expect(errors[0]).toContain('usage:');
  });

  it('fails on no command at all', () => {
    expect(main([])).toBe(1);
    expect(errors[0]).toMatch(/unknown command ''/);
  });

  it('fails on an unrecognised flag', () => {
    expect(main(['curves', '--agg', FIXTURES, '--out', 'x.svg', '--wat'])).toBe(1);
    expect(errors[0]).toMatch(/^error: /);
  });
});
