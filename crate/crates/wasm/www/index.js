import init, { world, flight, plan } from "./pkg/fmec_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("map");
const ctx = canvas.getContext("2d");
const colours = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

function inputs() {
  return [Number($("seed").value) >>> 0, Number($("ues").value), Number($("uavs").value)];
}

function draw(w, paths = []) {
  const sx = canvas.width / w.width;
  const sy = canvas.height / w.height;
  const px = ([x, y]) => [x * sx, canvas.height - y * sy];
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#888";
  for (const u of w.ues) {
    const [x, y] = px(u);
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
  paths.forEach((path, j) => {
    ctx.strokeStyle = ctx.fillStyle = colours[j % colours.length];
    ctx.beginPath();
    path.forEach((p, t) => (t ? ctx.lineTo(...px(p)) : ctx.moveTo(...px(p))));
    ctx.stroke();
    const [x, y] = px(path[0]);
    ctx.fillRect(x - 4, y - 4, 8, 8);
  });
}

const kj = (e) => (e / 1000).toFixed(3) + " kJ";

function run(action) {
  try {
    action();
  } catch (e) {
    $("log").innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

function onGenerate() {
  const w = JSON.parse(world(...inputs()));
  draw(w, w.takeoff.map((p) => [p]));
  $("log").textContent = `${w.ues.length} users, all local: ${kj(w.local_energy)}\nsquares mark take-off points`;
  return w;
}

function onFly() {
  const w = onGenerate();
  const f = JSON.parse(flight(...inputs(), $("baseline").value));
  draw(w, f.paths);
  const served = f.last_assignment.filter((a) => a !== null).length;
  const saved = 100 * (1 - f.energy / f.local_energy);
  $("log").textContent =
    `energy ${kj(f.energy)} (${saved.toFixed(1)}% below all-local)\n` +
    `served in last slot: ${served}/${f.last_assignment.length}\n\nper slot:\n` +
    f.slot_energy.map((e, t) => `${String(t).padStart(3)}  ${e.toFixed(2)} J`).join("\n");
}

function onPlan() {
  const w = onGenerate();
  const p = JSON.parse(plan(...inputs(), Number($("radius").value)));
  draw(w, p.paths);
  $("log").textContent =
    `all local ${kj(p.local_energy)}\n\nobjective per iteration:\n` +
    p.objectives.map((o, i) => `${String(i).padStart(3)}  ${kj(o)}`).join("\n");
}

await init();
$("gen").onclick = () => run(onGenerate);
$("fly").onclick = () => run(onFly);
$("plan").onclick = () => run(onPlan);
run(onGenerate);
