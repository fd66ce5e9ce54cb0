import init, { Cavity } from "./pkg/cavity_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function cavity() {
  return new Cavity(num("R"), num("r"), num("l"), num("a"), num("lambda"));
}

function showSummary(c) {
  const s = c.summary();
  const fmt = (x) => (Number.isFinite(x) ? x.toPrecision(6) : "-");
  const rows = [
    ["Fresnel number F", fmt(s.fresnel_number)],
    ["magnification M", fmt(s.magnification)],
    ["t = &pi;MF", fmt(s.chirp)],
    ["half-trace m", fmt(s.half_trace)],
    ["whole cavity stable", s.whole_cavity_stable],
    ["sub-cavity unstable", s.subcavity_unstable],
    ["paraxial (a < l/5)", s.paraxial],
    ["default W", fmt(s.default_half_width)],
  ];
  s.free();
  $("summary").innerHTML = rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`).join("");
}

function drawSpectrum(values) {
  const cv = $("spectrum");
  const g = cv.getContext("2d");
  const half = cv.width / 2;
  const scale = half * 0.9;
  g.clearRect(0, 0, cv.width, cv.height);
  g.strokeStyle = "#bbb";
  g.beginPath();
  g.arc(half, half, scale, 0, 2 * Math.PI);
  g.moveTo(0, half); g.lineTo(cv.width, half);
  g.moveTo(half, 0); g.lineTo(half, cv.height);
  g.stroke();
  g.fillStyle = "#1f5fbf";
  for (let k = 0; k < values.length; k += 2) {
    g.beginPath();
    g.arc(half + scale * values[k], half - scale * values[k + 1], k === 0 ? 4 : 2, 0, 2 * Math.PI);
    g.fill();
  }
}

function drawMode(profile) {
  const cv = $("mode");
  const g = cv.getContext("2d");
  const pad = 24;
  g.clearRect(0, 0, cv.width, cv.height);
  let yMax = 0, iMax = 0;
  for (let k = 0; k < profile.length; k += 2) {
    yMax = Math.max(yMax, Math.abs(profile[k]));
    iMax = Math.max(iMax, profile[k + 1]);
  }
  const px = (y) => pad + ((y + yMax) / (2 * yMax)) * (cv.width - 2 * pad);
  const py = (i) => cv.height - pad - (i / iMax) * (cv.height - 2 * pad);
  g.fillStyle = "#eee";
  g.fillRect(px(-1), pad, px(1) - px(-1), cv.height - 2 * pad);
  g.strokeStyle = "#c03";
  g.beginPath();
  for (let k = 0; k < profile.length; k += 2) {
    const f = k === 0 ? g.moveTo : g.lineTo;
    f.call(g, px(profile[k]), py(profile[k + 1]));
  }
  g.stroke();
  g.fillStyle = "#444";
  g.fillText("y/a", cv.width - pad, cv.height - 6);
  g.fillText("-1", px(-1) - 6, cv.height - 6);
  g.fillText("1", px(1) - 3, cv.height - 6);
}

function solve() {
  $("status").textContent = "";
  let c;
  try {
    c = cavity();
    showSummary(c);
    const kind = $("kind").value;
    const n = num("n"), W = num("W");
    const t0 = performance.now();
    const values = c.spectrum(kind, n, W);
    drawSpectrum(values);
    drawMode(c.mode(kind, n, W, num("index")));
    const top = Math.hypot(values[0], values[1]);
    $("status").style.color = "#333";
    $("status").textContent =
      `${values.length / 2} eigenvalues, max |gamma| = ${top.toFixed(6)} (${(performance.now() - t0).toFixed(0)} ms)`;
  } catch (e) {
    $("status").style.color = "#a00";
    $("status").textContent = String(e.message ?? e);
  } finally {
    if (c) c.free();
  }
}

await init();
$("go").addEventListener("click", solve);
for (const id of ["R", "r", "l", "a", "lambda"]) {
  $(id).addEventListener("change", () => {
    try {
      const c = cavity();
      showSummary(c);
      c.free();
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  });
}
solve();
