/** Error for malformed inputs and impossible figure requests. */
export class PlotError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'PlotError';
  }
}
