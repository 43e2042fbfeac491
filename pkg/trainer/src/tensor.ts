/** Dense row-major f64 matrix kernels. Shapes are passed explicitly; inner
 * loops are unrolled by four, which is worth ~1.5x under V8 here. */

export type F64 = Float64Array;

export function zeros(n: number): F64 {
  return new Float64Array(n);
}

/** out[n,m] = a[n,k] . b[k,m] */
export function matmul(a: F64, b: F64, n: number, k: number, m: number, out: F64): void {
  out.fill(0);
  const lim = m - 3;
  for (let i = 0; i < n; i++) {
    const ai = i * k;
    const oi = i * m;
    for (let p = 0; p < k; p++) {
      const av = a[ai + p];
      const bp = p * m;
      let j = 0;
      for (; j < lim; j += 4) {
        out[oi + j] += av * b[bp + j];
        out[oi + j + 1] += av * b[bp + j + 1];
        out[oi + j + 2] += av * b[bp + j + 2];
        out[oi + j + 3] += av * b[bp + j + 3];
      }
      for (; j < m; j++) out[oi + j] += av * b[bp + j];
    }
  }
}

/** out[n,m] = a[n,k] . b[m,k]^T */
export function matmulBT(a: F64, b: F64, n: number, k: number, m: number, out: F64): void {
  const lim = k - 3;
  for (let i = 0; i < n; i++) {
    const ai = i * k;
    const oi = i * m;
    for (let j = 0; j < m; j++) {
      const bj = j * k;
      let acc0 = 0;
      let acc1 = 0;
      let acc2 = 0;
      let acc3 = 0;
      let p = 0;
      for (; p < lim; p += 4) {
        acc0 += a[ai + p] * b[bj + p];
        acc1 += a[ai + p + 1] * b[bj + p + 1];
        acc2 += a[ai + p + 2] * b[bj + p + 2];
        acc3 += a[ai + p + 3] * b[bj + p + 3];
      }
      let acc = acc0 + acc1 + acc2 + acc3;
      for (; p < k; p++) acc += a[ai + p] * b[bj + p];
      out[oi + j] = acc;
    }
  }
}

/** out[k,m] += a[n,k]^T . b[n,m] (accumulates; caller zeroes when needed) */
export function matmulATAccum(a: F64, b: F64, n: number, k: number, m: number, out: F64): void {
  const lim = m - 3;
  for (let i = 0; i < n; i++) {
    const ai = i * k;
    const bi = i * m;
    for (let p = 0; p < k; p++) {
      const av = a[ai + p];
      const op = p * m;
      let j = 0;
      for (; j < lim; j += 4) {
        out[op + j] += av * b[bi + j];
        out[op + j + 1] += av * b[bi + j + 1];
        out[op + j + 2] += av * b[bi + j + 2];
        out[op + j + 3] += av * b[bi + j + 3];
      }
      for (; j < m; j++) out[op + j] += av * b[bi + j];
    }
  }
}

export function addBiasRows(x: F64, bias: F64, n: number, m: number): void {
  for (let i = 0; i < n; i++) {
    const xi = i * m;
    for (let j = 0; j < m; j++) {
      x[xi + j] += bias[j];
    }
  }
}

export function colSumAccum(x: F64, n: number, m: number, out: F64): void {
  for (let i = 0; i < n; i++) {
    const xi = i * m;
    for (let j = 0; j < m; j++) {
      out[j] += x[xi + j];
    }
  }
}
