/**
 * Minimal deterministic SVG assembly: fixed dimensions, no timestamps,
 * stable number formatting, so identical inputs yield identical bytes.
 */

export function escapeXml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}

/** Round to 2 decimals and trim trailing zeros ("12.00" -> "12"). */
export function fmt(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? '0' : String(rounded);
}

export type Attrs = Record<string, string | number>;

export function tag(name: string, attrs: Attrs, body?: string): string {
  const parts = Object.entries(attrs).map(
    ([key, val]) => `${key}="${typeof val === 'number' ? fmt(val) : escapeXml(val)}"`,
  );
  const open = parts.length > 0 ? `<${name} ${parts.join(' ')}` : `<${name}`;
  return body === undefined ? `${open}/>` : `${open}>${body}</${name}>`;
}

export function text(x: number, y: number, content: string, attrs: Attrs = {}): string {
  return tag('text', { x, y, ...attrs }, escapeXml(content));
}

export function svgDocument(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`;
  return [head, ...body, '</svg>', ''].join('\n');
}

/** Default qualitative palette, keyed by position. */
export const PALETTE = ['#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b'];
