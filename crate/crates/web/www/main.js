import init, { Simulation, Disagreement, transfer_table } from "./pkg/dimerlab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const report = (e) => { $("error").textContent = String(e); };

// y grows upwards on the lattice, downwards on the canvas
function drawEdges(ctx, edges, size, cell, colour, width) {
  ctx.strokeStyle = colour;
  ctx.lineWidth = width;
  ctx.beginPath();
  for (let i = 0; i < edges.length; i += 3) {
    const [x, y, horizontal] = [edges[i], edges[i + 1], edges[i + 2]];
    const px = (x + 0.5) * cell;
    const py = (size - y - 0.5) * cell;
    ctx.moveTo(px, py);
    if (horizontal) ctx.lineTo(px + cell, py);
    else ctx.lineTo(px, py - cell);
  }
  ctx.stroke();
}

function drawSites(ctx, size, cell) {
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, size * cell, size * cell);
  ctx.fillStyle = "#ccc";
  for (let y = 0; y < size; y++)
    for (let x = 0; x < size; x++)
      ctx.fillRect((x + 0.5) * cell - 1, (size - y - 0.5) * cell - 1, 2, 2);
}

let sim = null;
let running = false;

function resetSim() {
  try {
    sim = new Simulation(num("sim-size"), num("sim-size"), num("sim-beta"), num("sim-lambda"), num("sim-a"), 1, $("sim-packed").checked);
    report("");
    drawSim();
  } catch (e) { report(e); }
}

function drawSim() {
  const size = num("sim-size");
  const canvas = $("sim-canvas");
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / size;
  drawSites(ctx, size, cell);
  const overlay = $("sim-overlay").value;
  if (overlay !== "none") {
    const b = num("sim-b");
    try {
      const pts = sim.grid(b, overlay === "v");
      ctx.fillStyle = overlay === "v" ? "rgba(40,110,220,0.25)" : "rgba(220,90,40,0.25)";
      for (let i = 0; i < pts.length; i += 2) {
        ctx.fillRect(pts[i] * b * cell, (size - (pts[i + 1] + 1) * b) * cell, b * cell, b * cell);
      }
      const r = JSON.parse(sim.grid_report(b, overlay === "v"));
      $("sim-stats").dataset.grid = `grid: largest ${(100 * r.largest_fraction).toFixed(1)}%, spans ${r.spans_horizontally ? "H" : ""}${r.spans_vertically ? "V" : ""}`;
    } catch (e) { report(e); }
  } else {
    $("sim-stats").dataset.grid = "";
  }
  drawEdges(ctx, sim.dimers(), size, cell, "#222", Math.max(1, cell / 3));
  const s = JSON.parse(sim.stats());
  $("sim-stats").textContent =
    `sweeps        ${s.sweeps}\nvertical      ${s.vertical}\nhorizontal    ${s.horizontal}\nvacancies     ${s.vacancies}\n` +
    `broken links  ${s.broken_links}\nenergy        ${s.energy.toFixed(2)}\ninsert rate   ${s.insert_rate.toFixed(3)}\n` +
    `delete rate   ${s.delete_rate.toFixed(3)}\n${$("sim-stats").dataset.grid}`;
}

function loop() {
  if (!running) return;
  sim.run(5);
  drawSim();
  requestAnimationFrame(loop);
}

function updateTransfer() {
  try {
    const t = JSON.parse(transfer_table(num("tr-beta"), num("tr-lambda"), num("tr-a"), num("tr-len")));
    $("tr-head").textContent =
      `x1 = ${t.x1.toPrecision(8)}   x2 = ${t.x2.toPrecision(8)}   x3 = ${t.x3.toPrecision(8)}\n` +
      `x1 - 1 = ${t.x1_minus_one.toExponential(4)}   ell0 = ${t.ell0.toPrecision(6)}   correlation length = ${t.correlation_length.toPrecision(6)}`;
    const rows = t.rows.map((r) =>
      `<tr><td>${r.length}</td><td>${r.log_z_vacant.toFixed(6)}</td><td>${r.z_fullpacked === null ? "" : r.z_fullpacked.toFixed(6)}</td><td>${r.packed_lower_bound.toFixed(6)}</td></tr>`);
    $("tr-table").innerHTML = "<tr><th>L</th><th>log Z vacant</th><th>Z packed</th><th>lower bound</th></tr>" + rows.join("");
    report("");
  } catch (e) { report(e); }
}

let pair = null;
const PAIR_SIZE = 24;

function resetPair() {
  try {
    pair = new Disagreement(PAIR_SIZE, PAIR_SIZE, num("pair-beta"), 7);
    report("");
    drawPair();
  } catch (e) { report(e); }
}

function drawPair() {
  const canvas = $("pair-canvas");
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / PAIR_SIZE;
  drawSites(ctx, PAIR_SIZE, cell);
  let anchors = [];
  try {
    anchors = pair.sealed_anchors(num("pair-as"), num("pair-cs"), num("pair-n"));
  } catch (e) { report(e); }
  ctx.fillStyle = "rgba(60,170,80,0.18)";
  for (let i = 0; i < anchors.length; i += 2) {
    ctx.fillRect(anchors[i] * cell, (PAIR_SIZE - anchors[i + 1] - 1) * cell, cell, cell);
  }
  drawEdges(ctx, pair.left(), PAIR_SIZE, cell, "rgba(30,30,30,0.6)", Math.max(1, cell / 4));
  const delta = pair.delta();
  drawEdges(ctx, delta, PAIR_SIZE, cell, "#d22", Math.max(2, cell / 3));
  $("pair-stats").textContent = `disagreement edges  ${delta.length / 3}\nsealed anchors      ${anchors.length / 2} / ${PAIR_SIZE * PAIR_SIZE}\n\n` +
    "grey: first chain\nred: edges where the chains differ\ngreen: anchors of sealed rectangles";
}

await init();
$("sim-reset").onclick = resetSim;
$("sim-toggle").onclick = () => {
  running = !running;
  $("sim-toggle").textContent = running ? "pause" : "run";
  loop();
};
$("sim-beta").onchange = () => { try { sim.set_beta(num("sim-beta")); } catch (e) { report(e); } };
$("sim-overlay").onchange = drawSim;
$("sim-b").onchange = drawSim;
for (const id of ["tr-beta", "tr-lambda", "tr-a", "tr-len"]) $(id).oninput = updateTransfer;
$("pair-reset").onclick = resetPair;
$("pair-step").onclick = () => { pair.run(10); drawPair(); };
for (const id of ["pair-n", "pair-as", "pair-cs"]) $(id).onchange = drawPair;
resetSim();
updateTransfer();
resetPair();
