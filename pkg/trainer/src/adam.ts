/** Adam with linear learning-rate decay over the planned step count. */

import { ParamStore } from "./model.js";

export class Adam {
  private m = new Map<string, Float64Array>();
  private v = new Map<string, Float64Array>();
  private step = 0;
  readonly lr0: number;
  readonly totalSteps: number;
  readonly beta1 = 0.9;
  readonly beta2 = 0.999;
  readonly eps = 1e-8;

  constructor(lr: number, totalSteps: number) {
    if (lr <= 0) throw new Error("learning rate must be positive");
    this.lr0 = lr;
    this.totalSteps = Math.max(1, totalSteps);
  }

  currentLr(): number {
    const frac = Math.max(0.01, 1 - this.step / this.totalSteps);
    return this.lr0 * frac;
  }

  update(params: ParamStore): void {
    this.step += 1;
    const lr = this.currentLr();
    const b1 = this.beta1;
    const b2 = this.beta2;
    const bc1 = 1 - Math.pow(b1, this.step);
    const bc2 = 1 - Math.pow(b2, this.step);
    for (const name of params.names()) {
      const theta = params.get(name);
      const grad = params.grad(name);
      let m = this.m.get(name);
      let v = this.v.get(name);
      if (!m || !v) {
        m = new Float64Array(theta.length);
        v = new Float64Array(theta.length);
        this.m.set(name, m);
        this.v.set(name, v);
      }
      for (let i = 0; i < theta.length; i++) {
        const g = grad[i];
        m[i] = b1 * m[i] + (1 - b1) * g;
        v[i] = b2 * v[i] + (1 - b2) * g * g;
        const mhat = m[i] / bc1;
        const vhat = v[i] / bc2;
        theta[i] -= (lr * mhat) / (Math.sqrt(vhat) + this.eps);
      }
    }
    params.zeroGrads();
  }
}
