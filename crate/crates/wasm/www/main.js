import init, { kernel_curves, bump_profile, lemma_curves } from "./pkg/heatbound_wasm.js";
import { plot } from "./plot.js";

function fields(section) {
  const out = {};
  for (const el of section.querySelectorAll("input, select")) {
    out[el.name] = el.type === "number" || el.type === "range" || el.name === "m" ? Number(el.value) : el.value;
  }
  return out;
}

function run(section, body) {
  const info = section.querySelector(".info");
  try {
    body(info);
    if (info) info.classList.remove("error");
  } catch (err) {
    if (info) {
      info.textContent = String(err.message ?? err);
      info.classList.add("error");
    }
  }
}

function showRanges(section) {
  for (const input of section.querySelectorAll("input[type=range]")) {
    input.nextElementSibling.textContent = input.value;
  }
}

function drawKernel() {
  const section = document.getElementById("kernel");
  run(section, info => {
    const f = fields(section);
    const c = JSON.parse(kernel_curves(f.m, f.potential, f.gamma, f.half_width, f.nodes, f.x, f.t_min, f.t_max, 40));
    const series = [
      { x: c.t, y: c.k_numeric, color: "#1f5fbf", label: "k(t,x,x) numeric" },
      { x: c.t, y: c.u, color: "#999", dash: [6, 4], label: "envelope u" },
      { x: c.t, y: c.k_lower, color: "#c0392b", label: "certified lower" },
    ];
    if (c.reference) series.push({ x: c.t, y: c.reference, color: "#2a9d4b", points: true, label: "closed form" });
    plot(section.querySelector("canvas"), series, { logx: true, logy: true, xlabel: "t", ylabel: "kernel" });
    const h = c.hypothesis;
    const vacuous = c.k_lower.filter(v => v === null || v <= 0).length;
    info.textContent =
      `x = ${c.x.toFixed(4)} (nearest node)   sigma = ${h.sigma.toPrecision(4)}  mu = ${h.mu.toPrecision(4)}  ` +
      `lambda = ${h.lambda.toPrecision(4)}  alpha = ${c.alpha.toPrecision(4)}\n` +
      `${vacuous} of ${c.t.length} times give no positive bound (not shown on the log axis)`;
  });
}

function drawBump() {
  const section = document.getElementById("bump");
  showRanges(section);
  run(section, info => {
    const f = fields(section);
    const b = JSON.parse(bump_profile(f.m, "canonical", 2, f.half_width, f.nodes, f.x, f.beta, 1e-3, 10, 60));
    const [left, right] = section.querySelectorAll("canvas");
    plot(left, [{ x: b.y, y: b.g, color: "#1f5fbf", label: "g" }], { xlabel: "y", ylabel: "g(y)" });
    plot(right, [{ x: b.t, y: b.v_star, color: "#c0392b", label: "V*(t)" }], { logx: true, logy: true, xlabel: "t", ylabel: "V*" });
    info.textContent = `centre ${b.center.toFixed(4)}, plateau half-width ${b.width.toPrecision(4)}`;
  });
}

function drawLemmas() {
  const section = document.getElementById("lemmas");
  showRanges(section);
  run(section, () => {
    const f = fields(section);
    const c = JSON.parse(lemma_curves(f.alpha, f.lambda, 120));
    const [left, right] = section.querySelectorAll("canvas");
    plot(left, [
      { x: c.delta, y: c.integral_lhs, color: "#1f5fbf", label: "integral" },
      { x: c.delta, y: c.integral_rhs, color: "#c0392b", dash: [6, 4], label: "C (ln 1/d)^(l-1)" },
      { x: c.delta, y: c.gamma_lhs, color: "#2a9d4b", label: "gamma lhs" },
      { x: c.delta, y: c.gamma_rhs, color: "#999", dash: [2, 3], label: "d" },
    ], { logx: true, logy: true, xlabel: "delta", ylabel: "value" });
    plot(right, [
      { x: c.s, y: c.p, color: "#1f5fbf", label: "p(s)" },
      { x: c.s, y: c.s.map(s => f.alpha * s), color: "#999", dash: [6, 4], label: "alpha s" },
    ], { xlabel: "s", ylabel: "exponent" });
  });
}

await init();
document.querySelector("#kernel button").addEventListener("click", drawKernel);
document.getElementById("bump").addEventListener("input", drawBump);
document.getElementById("lemmas").addEventListener("input", drawLemmas);
drawKernel();
drawBump();
drawLemmas();
