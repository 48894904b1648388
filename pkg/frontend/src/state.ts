/** Selection state plus a guard that drops stale fetch responses. */

export interface ViewState {
  datasetId: string | null;
  sweepId: string | null;
  seriesId: string | null;
  window: number | null;
  /** classes hidden in the substitution-response view; data stays loaded */
  hiddenClasses: Set<string>;
  pdpGrid: number;
}

export function initialState(): ViewState {
  return {
    datasetId: null,
    sweepId: null,
    seriesId: null,
    window: null,
    hiddenClasses: new Set(),
    pdpGrid: 20,
  };
}

/** Monotonic tokens per channel: a response is applied only when its token
 * is still the latest issued for that channel, so slow responses for an
 * earlier selection never overwrite the current one. */
export class FetchGuard {
  private counters = new Map<string, number>();

  issue(channel: string): number {
    const next = (this.counters.get(channel) ?? 0) + 1;
    this.counters.set(channel, next);
    return next;
  }

  isCurrent(channel: string, token: number): boolean {
    return this.counters.get(channel) === token;
  }
}

/** Trailing-edge debounce, used for hover-triggered confusion fetches. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
