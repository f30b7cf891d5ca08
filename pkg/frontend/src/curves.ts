/**
 * Learning-curve figure: one median line plus a shaded interquartile band
 * per RM family, on a shared evaluation-step grid.
 */

import { format } from 'd3-format';
import { scaleLinear } from 'd3-scale';
import { area, line } from 'd3-shape';
import { FamilySeries } from './csv.js';
import { PlotError } from './errors.js';
import { PALETTE, fmt, svgDocument, tag, text } from './svg.js';

export type XScale = 'raw' | 'millions';

export interface CurvesSpec {
  series: FamilySeries[];
  /** x tick style: 'raw' uses scientific notation, 'millions' divides by 1e6. */
  scale?: XScale;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 36, right: 20, bottom: 52, left: 64 };

function xTickFormat(scale: XScale): (value: number) => string {
  if (scale === 'millions') {
    return (v) => `${fmt(v / 1e6)}M`;
  }
  const sci = format('.1~e');
  return (v) => (v === 0 ? '0' : sci(v));
}

export function renderCurves(spec: CurvesSpec): string {
  const series = spec.series;
  if (series.length === 0) {
    throw new PlotError('no family series to plot');
  }
  const steps = series[0]!.steps;
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const allLo = series.flatMap((s) => s.p25);
  const allHi = series.flatMap((s) => s.p75);
  const x = scaleLinear()
    .domain([Math.min(...steps), Math.max(...steps)])
    .range([MARGIN.left, MARGIN.left + innerW]);
  const y = scaleLinear()
    .domain([Math.min(...allLo), Math.max(...allHi)])
    .nice(6)
    .range([MARGIN.top + innerH, MARGIN.top]);

  const body: string[] = [];
  body.push(tag('rect', { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: '#ffffff' }));

  // horizontal grid lines and y ticks
  const yTicks = y.ticks(6);
  const gridLines = yTicks.map((t) =>
    tag('line', {
      x1: MARGIN.left,
      x2: MARGIN.left + innerW,
      y1: y(t),
      y2: y(t),
      stroke: '#e5e5e5',
      'stroke-width': 1,
    }),
  );
  body.push(tag('g', { class: 'grid-lines' }, gridLines.join('')));

  const tickText = { 'font-size': 11, fill: '#333333' };
  const yAxis = yTicks
    .map((t) =>
      text(MARGIN.left - 8, y(t) + 3.5, String(t), { ...tickText, 'text-anchor': 'end' }),
    )
    .join('');
  body.push(tag('g', { class: 'axis axis-y' }, yAxis));

  const fmtX = xTickFormat(spec.scale ?? 'raw');
  const xTicks = x.ticks(6);
  const xAxis = xTicks
    .map(
      (t) =>
        tag('line', {
          x1: x(t),
          x2: x(t),
          y1: MARGIN.top + innerH,
          y2: MARGIN.top + innerH + 4,
          stroke: '#333333',
          'stroke-width': 1,
        }) +
        text(x(t), MARGIN.top + innerH + 17, fmtX(t), { ...tickText, 'text-anchor': 'middle' }),
    )
    .join('');
  body.push(tag('g', { class: 'axis axis-x' }, xAxis));

  body.push(
    tag('line', {
      x1: MARGIN.left,
      x2: MARGIN.left + innerW,
      y1: MARGIN.top + innerH,
      y2: MARGIN.top + innerH,
      stroke: '#333333',
      'stroke-width': 1,
    }),
    tag('line', {
      x1: MARGIN.left,
      x2: MARGIN.left,
      y1: MARGIN.top,
      y2: MARGIN.top + innerH,
      stroke: '#333333',
      'stroke-width': 1,
    }),
  );

  // one band + median per family
  const idx = steps.map((_, i) => i);
  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length]!;
    const bandPath = area<number>()
      .x((i) => x(steps[i]!))
      .y0((i) => y(s.p25[i]!))
      .y1((i) => y(s.p75[i]!))(idx)!;
    const medianPath = line<number>()
      .x((i) => x(steps[i]!))
      .y((i) => y(s.p50[i]!))(idx)!;
    const band = tag('path', { class: 'band', d: bandPath, fill: color, 'fill-opacity': 0.18 });
    const median = tag('path', {
      class: 'median',
      d: medianPath,
      fill: 'none',
      stroke: color,
      'stroke-width': 1.8,
    });
    body.push(tag('g', { class: 'series', 'data-family': s.family }, band + median));
  });

  // legend, top-left inside the plot area
  const legendItems = series.map((s, si) => {
    const color = PALETTE[si % PALETTE.length]!;
    const ly = MARGIN.top + 14 + si * 18;
    return (
      tag('line', {
        x1: MARGIN.left + 12,
        x2: MARGIN.left + 36,
        y1: ly - 4,
        y2: ly - 4,
        stroke: color,
        'stroke-width': 2.5,
      }) +
      text(MARGIN.left + 42, ly, s.family, {
        class: 'legend-label',
        'font-size': 12,
        fill: '#1a1a1a',
      })
    );
  });
  body.push(tag('g', { class: 'legend' }, legendItems.join('')));

  const xLabel = spec.xLabel ?? (spec.scale === 'millions' ? 'training steps (millions)' : 'training steps');
  const yLabel = spec.yLabel ?? 'eval return';
  body.push(
    text(MARGIN.left + innerW / 2, HEIGHT - 12, xLabel, {
      class: 'axis-label axis-label-x',
      'font-size': 12,
      'text-anchor': 'middle',
      fill: '#1a1a1a',
    }),
    tag(
      'g',
      { transform: `translate(16 ${MARGIN.top + innerH / 2}) rotate(-90)` },
      text(0, 0, yLabel, {
        class: 'axis-label axis-label-y',
        'font-size': 12,
        'text-anchor': 'middle',
        fill: '#1a1a1a',
      }),
    ),
  );
  if (spec.title !== undefined) {
    body.push(
      text(WIDTH / 2, 20, spec.title, {
        class: 'title',
        'font-size': 14,
        'font-weight': 'bold',
        'text-anchor': 'middle',
        fill: '#1a1a1a',
      }),
    );
  }
  return svgDocument(WIDTH, HEIGHT, body);
}
