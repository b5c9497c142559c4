import init, { example, attribute, interaction, converse } from "./pkg/powerdex_wasm.js";

const $ = (id) => document.getElementById(id);
const THETA_STEPS = 12;

function gcd(a, b) {
  return b === 0 ? a : gcd(b, a % b);
}

function thetaText() {
  const k = Number($("theta").value);
  const g = gcd(k, THETA_STEPS) || 1;
  return k === 0 ? "0" : k === THETA_STEPS ? "1" : `${k / g}/${THETA_STEPS / g}`;
}

function scheme() {
  const kind = document.querySelector("input[name=scheme]:checked").value;
  if (kind === "bernoulli") return JSON.stringify({ bernoulli: { theta: thetaText() } });
  return JSON.stringify({ preset: kind });
}

function inputs() {
  return [$("model").value, $("dist").value, $("instance").value];
}

function show(text, isError) {
  $("out").textContent = text;
  $("out").className = isError ? "error" : "";
}

function guarded(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      show(String(e), true);
    }
  };
}

function featureNames() {
  try {
    return JSON.parse($("model").value).space.features.map((f) => f.name);
  } catch {
    return [];
  }
}

function renderSetBoxes() {
  const box = $("set-boxes");
  box.textContent = "";
  for (const name of featureNames()) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "checkbox";
    input.value = name;
    label.append(input, ` ${name} `);
    box.append(label);
  }
}

function renderBars(report) {
  const bars = $("bars");
  bars.textContent = "";
  const nums = report.decimals.map(Number);
  const scale = Math.max(...nums.map(Math.abs), 1e-12);
  report.features.forEach((name, i) => {
    const row = document.createElement("div");
    row.className = "bar";
    const width = (50 * Math.abs(nums[i])) / scale;
    const left = nums[i] >= 0 ? 50 : 50 - width;
    row.innerHTML =
      `<span class="label"></span><span class="track">` +
      `<span class="fill ${nums[i] >= 0 ? "pos" : "neg"}" style="left:${left}%;width:${width}%"></span>` +
      `</span><span class="num"></span>`;
    row.querySelector(".label").textContent = name;
    row.querySelector(".num").textContent = `${report.values[i]} (${report.decimals[i]})`;
    bars.append(row);
  });
}

function loadExample() {
  const doc = JSON.parse(example(Number($("seed").value), Number($("n").value)));
  $("model").value = JSON.stringify(doc.model, null, 1);
  $("dist").value = JSON.stringify(doc.distribution, null, 1);
  $("instance").value = JSON.stringify(doc.instance);
  renderSetBoxes();
  runAttribute();
}

function runAttribute() {
  const report = JSON.parse(attribute(...inputs(), scheme()));
  renderBars(report);
  show(JSON.stringify(report, null, 2), false);
}

function runInteraction() {
  const set = [...document.querySelectorAll("#set-boxes input:checked")].map((b) => b.value).join(",");
  show(interaction(...inputs(), scheme(), set), false);
}

function runConverse() {
  show(converse(...inputs(), scheme()), false);
}

await init();
$("random").onclick = guarded(loadExample);
$("run-attribute").onclick = guarded(runAttribute);
$("run-interaction").onclick = guarded(runInteraction);
$("run-converse").onclick = guarded(runConverse);
$("model").onchange = renderSetBoxes;
$("theta").oninput = () => {
  $("theta-out").textContent = thetaText();
};
guarded(loadExample)();
