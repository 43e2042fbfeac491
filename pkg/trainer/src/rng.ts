/**
 * Portable PRNG (mulberry32), bit-compatible with the dataset builder's
 * implementation: the same seed must replay the same mask positions here
 * that the builder recorded. All ops are explicit 32-bit.
 */

export class Mulberry32 {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  nextU32(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1) >>> 0;
    const inner = Math.imul(t ^ (t >>> 7), t | 61) >>> 0;
    t = (t ^ ((t + inner) >>> 0)) >>> 0;
    return (t ^ (t >>> 14)) >>> 0;
  }

  nextBelow(n: number): number {
    if (n <= 0) throw new Error("n must be positive");
    return this.nextU32() % n;
  }

  /** Uniform in [0, 1). */
  nextFloat(): number {
    return this.nextU32() / 4294967296;
  }

  /** Standard normal via Box-Muller. */
  nextGaussian(): number {
    let u = this.nextFloat();
    if (u === 0) u = 1e-12;
    const v = this.nextFloat();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  }

  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.nextBelow(i + 1);
      const tmp = items[i];
      items[i] = items[j];
      items[j] = tmp;
    }
  }
}

/** Deterministically pick k of positions 0..n-1, sorted ascending. */
export function samplePositions(n: number, k: number, seed: number): number[] {
  if (k > n) throw new Error("cannot sample more positions than exist");
  const rng = new Mulberry32(seed);
  const idx = new Array<number>(n);
  for (let i = 0; i < n; i++) idx[i] = i;
  for (let i = 0; i < k; i++) {
    const j = i + rng.nextBelow(n - i);
    const tmp = idx[i];
    idx[i] = idx[j];
    idx[j] = tmp;
  }
  return idx.slice(0, k).sort((a, b) => a - b);
}
