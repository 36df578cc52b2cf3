import { describe, expect, it, vi } from 'vitest';

import { Store } from '../src/state/store';

interface Demo {
  count: number;
  label: string;
}

describe('Store', () => {
  it('returns the initial state until changed', () => {
    const store = new Store<Demo>({ count: 0, label: 'zero' });
    expect(store.get()).toEqual({ count: 0, label: 'zero' });
  });

  it('set replaces the state and notifies subscribers', () => {
    const store = new Store<Demo>({ count: 0, label: 'zero' });
    const seen: Demo[] = [];
    store.subscribe((state) => seen.push(state));
    store.set({ count: 1, label: 'one' });
    expect(store.get()).toEqual({ count: 1, label: 'one' });
    expect(seen).toEqual([{ count: 1, label: 'one' }]);
  });

  it('update merges a partial patch over the current state', () => {
    const store = new Store<Demo>({ count: 0, label: 'zero' });
    store.update({ count: 5 });
    expect(store.get()).toEqual({ count: 5, label: 'zero' });
  });

  it('unsubscribing stops notifications', () => {
    const store = new Store<Demo>({ count: 0, label: 'zero' });
    const listener = vi.fn();
    const unsubscribe = store.subscribe(listener);
    store.update({ count: 1 });
    unsubscribe();
    store.update({ count: 2 });
    expect(listener).toHaveBeenCalledTimes(1);
  });

  it('a listener that unsubscribes itself does not break others', () => {
    const store = new Store<Demo>({ count: 0, label: 'zero' });
    const other = vi.fn();
    const unsubscribe = store.subscribe(() => unsubscribe());
    store.subscribe(other);
    store.update({ count: 1 });
    store.update({ count: 2 });
    expect(other).toHaveBeenCalledTimes(2);
  });

  it('all subscribers see every change in order', () => {
    const store = new Store<number>(0);
    const first: number[] = [];
    const second: number[] = [];
    store.subscribe((n) => first.push(n));
    store.subscribe((n) => second.push(n));
    store.set(1);
    store.set(2);
    expect(first).toEqual([1, 2]);
    expect(second).toEqual([1, 2]);
  });
});
