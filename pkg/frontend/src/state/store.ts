export type Listener<T> = (state: T) => void;

/**
 * Minimal observable state container. State is replaced wholesale on every
 * change and subscribers are notified synchronously, which keeps render
 * timing trivial to reason about in tests.
 */
export class Store<T> {
  private state: T;
  private readonly listeners = new Set<Listener<T>>();

  constructor(initial: T) {
    this.state = initial;
  }

  get(): T {
    return this.state;
  }

  set(next: T): void {
    this.state = next;
    // Copy first so a listener that unsubscribes mid-notification does not
    // perturb the iteration.
    for (const listener of [...this.listeners]) {
      listener(next);
    }
  }

  update(patch: Partial<T>): void {
    this.set({ ...this.state, ...patch });
  }

  subscribe(listener: Listener<T>): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }
}
