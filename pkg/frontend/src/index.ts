export { PlotError } from './errors.js';
export { groupFamilies, parseAggregateCsv, parseTrajectoryCsv } from './csv.js';
export type { AggregateRow, FamilySeries, TrajectoryPoint } from './csv.js';
export { parseMap } from './map.js';
export type { GridMap } from './map.js';
export { renderCurves } from './curves.js';
export type { CurvesSpec, XScale } from './curves.js';
export { renderTrajectory } from './traj.js';
export type { TrajectorySpec } from './traj.js';
export { main } from './cli.js';
