import { describe, expect, it } from "vitest";

import { OptimisticStore } from "../src/optimistic.js";

interface Row {
  id: number;
  label: string;
}

describe("OptimisticStore", () => {
  it("applies locally before the commit resolves", async () => {
    const store = new OptimisticStore<Row[]>([{ id: 1, label: "plain" }]);
    const seen: string[] = [];
    store.subscribe((rows) => seen.push(rows[0]!.label));

    let release!: (value: string) => void;
    const gate = new Promise<string>((resolve) => (release = resolve));
    const mutation = store.mutate(
      (rows) => rows.map((r) => ({ ...r, label: "pending" })),
      () => gate,
      (rows, result) => rows.map((r) => ({ ...r, label: result })),
    );
    expect(store.get()[0]!.label).toBe("pending");
    release("confirmed");
    await mutation;
    expect(store.get()[0]!.label).toBe("confirmed");
    expect(seen).toEqual(["pending", "confirmed"]);
  });

  it("rolls back to the snapshot when the commit rejects", async () => {
    const store = new OptimisticStore<Row[]>([{ id: 1, label: "plain" }]);
    const states: string[] = [];
    store.subscribe((rows) => states.push(rows[0]!.label));

    await expect(
      store.mutate(
        (rows) => rows.map((r) => ({ ...r, label: "pending" })),
        () => Promise.reject(new Error("service down")),
        (rows) => rows,
      ),
    ).rejects.toThrow("service down");
    expect(store.get()[0]!.label).toBe("plain");
    expect(states).toEqual(["pending", "plain"]);
  });

  it("returns the commit result", async () => {
    const store = new OptimisticStore<number>(0);
    const result = await store.mutate(
      (n) => n + 1,
      () => Promise.resolve("receipt"),
      (n) => n,
    );
    expect(result).toBe("receipt");
  });

  it("supports unsubscribe", () => {
    const store = new OptimisticStore<number>(0);
    let calls = 0;
    const unsubscribe = store.subscribe(() => calls++);
    store.set(1);
    unsubscribe();
    store.set(2);
    expect(calls).toBe(1);
  });
});
