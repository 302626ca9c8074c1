// Minimal canvas line plots with optional log axes.

const PAD = { left: 62, right: 12, top: 12, bottom: 36 };

function finite(v, log) {
  return v !== null && Number.isFinite(v) && (!log || v > 0);
}

function range(values, log) {
  let lo = Infinity, hi = -Infinity;
  for (const v of values) {
    if (!finite(v, log)) continue;
    const w = log ? Math.log10(v) : v;
    lo = Math.min(lo, w);
    hi = Math.max(hi, w);
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (hi - lo < 1e-12) { lo -= 0.5; hi += 0.5; }
  const pad = 0.04 * (hi - lo);
  return [lo - pad, hi + pad];
}

function ticks(lo, hi, log) {
  if (log) {
    const out = [];
    const step = Math.max(1, Math.ceil((hi - lo) / 8));
    for (let e = Math.ceil(lo); e <= hi; e += step) out.push(e);
    return out;
  }
  const raw = (hi - lo) / 6;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map(f => f * mag).find(s => s >= raw);
  const out = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi; v += step) out.push(v);
  return out;
}

function label(v, log) {
  if (log) return `1e${v}`;
  return Math.abs(v) < 1e-9 ? "0" : Number(v.toPrecision(3)).toString();
}

// series: [{ x, y, color, label, dash, points }]
export function plot(canvas, series, opts = {}) {
  const { logx = false, logy = false, xlabel = "", ylabel = "" } = opts;
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  const [x0, x1] = range(series.flatMap(s => s.x), logx);
  const [y0, y1] = range(series.flatMap(s => s.y), logy);
  const px = v => PAD.left + ((logx ? Math.log10(v) : v) - x0) / (x1 - x0) * (W - PAD.left - PAD.right);
  const py = v => H - PAD.bottom - ((logy ? Math.log10(v) : v) - y0) / (y1 - y0) * (H - PAD.top - PAD.bottom);

  ctx.font = "11px system-ui, sans-serif";
  ctx.strokeStyle = "#ddd";
  ctx.fillStyle = "#444";
  ctx.lineWidth = 1;
  ctx.textAlign = "center";
  for (const t of ticks(x0, x1, logx)) {
    const X = px(logx ? 10 ** t : t);
    ctx.beginPath(); ctx.moveTo(X, PAD.top); ctx.lineTo(X, H - PAD.bottom); ctx.stroke();
    ctx.fillText(label(t, logx), X, H - PAD.bottom + 14);
  }
  ctx.textAlign = "right";
  for (const t of ticks(y0, y1, logy)) {
    const Y = py(logy ? 10 ** t : t);
    ctx.beginPath(); ctx.moveTo(PAD.left, Y); ctx.lineTo(W - PAD.right, Y); ctx.stroke();
    ctx.fillText(label(t, logy), PAD.left - 4, Y + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xlabel, (PAD.left + W - PAD.right) / 2, H - 6);
  ctx.save();
  ctx.translate(12, (PAD.top + H - PAD.bottom) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();

  let legendY = PAD.top + 12;
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.lineWidth = 2;
    ctx.setLineDash(s.dash ?? []);
    if (s.points) {
      s.x.forEach((xv, i) => {
        if (!finite(xv, logx) || !finite(s.y[i], logy)) return;
        ctx.beginPath(); ctx.arc(px(xv), py(s.y[i]), 3, 0, 2 * Math.PI); ctx.fill();
      });
    } else {
      ctx.beginPath();
      let open = false;
      s.x.forEach((xv, i) => {
        if (!finite(xv, logx) || !finite(s.y[i], logy)) { open = false; return; }
        if (open) ctx.lineTo(px(xv), py(s.y[i])); else ctx.moveTo(px(xv), py(s.y[i]));
        open = true;
      });
      ctx.stroke();
    }
    ctx.setLineDash([]);
    if (s.label) {
      ctx.textAlign = "left";
      ctx.fillText(s.label, W - PAD.right - 150, legendY);
      legendY += 14;
    }
  }
}
