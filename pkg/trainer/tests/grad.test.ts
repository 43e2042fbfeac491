import assert from "node:assert/strict";
import { test } from "node:test";

import { pretrainSample, DEFAULT_TRAIN } from "../src/train.js";
import { Mulberry32 } from "../src/rng.js";
import { syntheticRecord, tinyEncoder } from "./util.js";

const CFG = { ...DEFAULT_TRAIN, maskRate: 0.25 };

test("analytic gradients match central finite differences (1e-4 relative)", () => {
  const encoder = tinyEncoder(5);
  const record = syntheticRecord(17);

  encoder.params.zeroGrads();
  pretrainSample(encoder, record, CFG, true);

  // snapshot analytic grads before probing
  const names = encoder.params.names();
  const analytic = new Map<string, Float64Array>();
  for (const name of names) analytic.set(name, encoder.params.grad(name).slice());

  const rng = new Mulberry32(99);
  const eps = 1e-5;
  let checked = 0;
  let attempts = 0;
  while (checked < 10 && attempts < 200) {
    attempts++;
    const name = names[rng.nextBelow(names.length)];
    const theta = encoder.params.get(name);
    const idx = rng.nextBelow(theta.length);
    const g = analytic.get(name)![idx];
    if (Math.abs(g) < 1e-7) continue; // dead direction; FD would be noise
    const saved = theta[idx];
    theta[idx] = saved + eps;
    const up = pretrainSample(encoder, record, CFG, false).joint;
    theta[idx] = saved - eps;
    const down = pretrainSample(encoder, record, CFG, false).joint;
    theta[idx] = saved;
    const numeric = (up - down) / (2 * eps);
    const rel = Math.abs(numeric - g) / Math.max(Math.abs(numeric), Math.abs(g));
    assert.ok(
      rel < 1e-4,
      `${name}[${idx}]: analytic ${g} vs numeric ${numeric} (rel ${rel})`,
    );
    checked++;
  }
  assert.equal(checked, 10, "could not find 10 live parameters to probe");
});

test("gradients flow into every parameter group", () => {
  const encoder = tinyEncoder(6);
  const record = syntheticRecord(23);
  encoder.params.zeroGrads();
  pretrainSample(encoder, record, CFG, true);
  for (const name of encoder.params.names()) {
    const grad = encoder.params.grad(name);
    let any = false;
    for (let i = 0; i < grad.length; i++) {
      if (grad[i] !== 0) {
        any = true;
        break;
      }
    }
    // positions beyond the sequence never receive position-embedding grads
    if (name === "pos_emb") continue;
    assert.ok(any, `no gradient reached ${name}`);
  }
});
