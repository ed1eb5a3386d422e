/** Optimistic state updates with rollback.
 *
 * A mutation applies locally first so the UI answers immediately, then the
 * service call either reconciles the state with the real response or, on
 * failure, restores the pre-mutation snapshot before rethrowing for the
 * caller's error banner.
 */

export class OptimisticStore<S> {
  private listeners: Array<(state: S) => void> = [];

  constructor(private state: S) {}

  get(): S {
    return this.state;
  }

  subscribe(listener: (state: S) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  set(state: S): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  async mutate<T>(
    apply: (state: S) => S,
    commit: () => Promise<T>,
    reconcile: (state: S, result: T) => S,
  ): Promise<T> {
    const snapshot = this.state;
    this.set(apply(this.state));
    try {
      const result = await commit();
      this.set(reconcile(this.state, result));
      return result;
    } catch (error) {
      this.set(snapshot);
      throw error;
    }
  }
}
