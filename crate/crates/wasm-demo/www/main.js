import init, { Demo } from "./pkg/transitmap_wasm.js";

const $ = (id) => document.getElementById(id);
let demo = null;
let lastRun = "";

function status(extra) {
  const score = JSON.parse(demo.score());
  $("status").textContent =
    `S | V | E | L | M\n${demo.dims()}\n\n` +
    `crossings    ${score.crossings}\nseparations  ${score.separations}` +
    (extra ? `\n\n${extra}` : "");
}

function draw() {
  try {
    $("map").innerHTML = demo.render(Number($("width").value), $("curve").value);
  } catch (e) {
    $("map").textContent = e.message;
  }
}

function generate() {
  try {
    demo = new Demo($("preset").value, Number($("seed").value));
  } catch (e) {
    $("status").textContent = e.message;
    return;
  }
  lastRun = "random ordering";
  status(lastRun);
  draw();
}

function optimize() {
  const t = performance.now();
  try {
    const r = JSON.parse(demo.optimize($("variant").value));
    lastRun = `variant ${$("variant").value}, ${(performance.now() - t).toFixed(0)} ms\n` +
      `core ${r.core}, ${r.components} components`;
  } catch (e) {
    lastRun = e.message;
  }
  status(lastRun);
  draw();
}

function shuffle() {
  demo.shuffle(Math.floor(Math.random() * 2 ** 32));
  lastRun = "random ordering";
  status(lastRun);
  draw();
}

await init();
$("generate").addEventListener("click", generate);
$("optimize").addEventListener("click", optimize);
$("shuffle").addEventListener("click", shuffle);
$("width").addEventListener("input", draw);
$("curve").addEventListener("change", draw);
generate();
