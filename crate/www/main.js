import init, { pure_absorption, spectral_radius, sharpness } from "./pkg/rte_browser.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, f) {
  const out = $(id);
  out.className = "";
  out.textContent = "running...";
  // let the page repaint before the synchronous solve
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const { text, ok } = f();
      out.textContent = `${text}\n(${(performance.now() - t0).toFixed(0)} ms)`;
      out.className = ok ? "ok" : "bad";
    } catch (e) {
      out.textContent = String(e.message ?? e);
      out.className = "bad";
    }
  }, 10);
}

await init();

$("pa-run").onclick = () => show("pa-out", () => {
  const r = pure_absorption(num("pa-grid"), num("pa-order"), num("pa-boundary"), num("pa-sigma"));
  const text = `nodes ${r.nodes}\nmax |phi - exp(-sigma t)| = ${r.max_error.toExponential(3)}\n` +
    `Fubini measure relative error = ${r.fubini_relative_error.toExponential(3)}`;
  return { text, ok: r.fubini_relative_error <= 1e-2 };
});

$("sp-run").onclick = () => show("sp-out", () => {
  const r = spectral_radius(num("sp-grid"), 2, num("sp-rate"), num("sp-steps"), BigInt(num("sp-seed")));
  const rhos = [r.rho_1, r.rho_2, r.rho_inf];
  const text = `rho (p = 1, 2, inf) = ${rhos.map((x) => x.toFixed(4)).join(", ")}\n` +
    `bound 1 - exp(-C) = ${r.bound.toFixed(4)}`;
  return { text, ok: rhos.every((x) => x <= r.bound + 0.02) };
});

$("sh-run").onclick = () => show("sh-out", () => {
  const r = sharpness(num("sh-l"), num("sh-n"));
  const text = `k = ${r.k}, sup of t f(t) at t = ${r.argmax_t.toPrecision(6)}\n` +
    `log lhs = ${r.log_lhs.toPrecision(10)}\nlog rhs = ${r.log_rhs.toPrecision(10)}\n` +
    `gap = ${r.gap.toPrecision(10)}\nlog a - log b = ${(r.log_a - r.log_b).toPrecision(10)}`;
  return { text, ok: r.gap <= 0 };
});
