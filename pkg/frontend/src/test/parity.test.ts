import assert from "node:assert/strict";
import test from "node:test";

import { buildShieldLayer } from "../index";
import {
  HEMOGLOBIN_TEXT,
  TRAFFIC_TEXT,
  assertBitIdentical,
  cliApply,
  feasibleLinearText,
  mulberry32,
  plantedCnfText,
  randomRows,
  tempDir,
  writeFixture,
} from "./util";

test("golden cases match a direct CLI apply bit-exactly", () => {
  const dir = tempDir();
  const traffic = writeFixture(dir, "traffic.cnf", TRAFFIC_TEXT);
  const clinical = writeFixture(dir, "clinical.lin", HEMOGLOBIN_TEXT);

  const trafficRows = [
    [0.9, 0.4, 0.3, 0.2],
    [0.9, 0.8, 0.1, 0.2],
    [0.2, 0.6, 0.6, 0.1],
  ];
  const viaBinding = buildShieldLayer(4, traffic).forward(trafficRows) as number[][];
  assertBitIdentical(viaBinding, cliApply(traffic, trafficRows, 4));

  const clinicalRows = [
    [10, 12, 38, 37],
    [12, 10, 38, 37],
  ];
  const viaBinding2 = buildShieldLayer(4, clinical).forward(clinicalRows) as number[][];
  assertBitIdentical(viaBinding2, cliApply(clinical, clinicalRows, 4));
});

test("forward parity on 20 fuzz cases", () => {
  const rng = mulberry32(0xc0ffee);
  const dir = tempDir();
  for (let i = 0; i < 20; i++) {
    const cnf = i % 2 === 0;
    const [n, text] = cnf ? plantedCnfText(rng) : feasibleLinearText(rng);
    const file = writeFixture(dir, `fuzz_${i}.txt`, text);
    const rows = cnf ? randomRows(rng, 5, n, 0, 1) : randomRows(rng, 5, n, -6, 6);
    const handle = buildShieldLayer(n, file);
    const viaBinding = handle.forward(rows) as number[][];
    assertBitIdentical(viaBinding, cliApply(file, rows, n));
  }
});

test("forward is deterministic across calls", () => {
  const rng = mulberry32(0x5eed);
  const dir = tempDir();
  const [n, text] = plantedCnfText(rng);
  const handle = buildShieldLayer(n, writeFixture(dir, "det.cnf", text));
  const rows = randomRows(rng, 3, n, 0, 1);
  assertBitIdentical(handle.forward(rows) as number[][], handle.forward(rows) as number[][]);
});
