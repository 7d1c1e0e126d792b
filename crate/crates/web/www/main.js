import init, { stability_map, sle_curve, vibration_profile } from "./pkg/chatter_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const PAD = { l: 60, r: 20, t: 14, b: 36 };

function model() {
  return { immersion: num("immersion"), steps: Math.round(num("steps")), zoh: $("hold").value === "zoh" };
}

function status(text, error = false) {
  $("status").textContent = text;
  $("status").className = error ? "err" : "";
}

// axes helper: maps data to canvas pixels and draws ticks
function frame(canvas, xlo, xhi, ylo, yhi, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width - PAD.l - PAD.r;
  const h = canvas.height - PAD.t - PAD.b;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const X = (v) => PAD.l + ((v - xlo) / (xhi - xlo || 1)) * w;
  const Y = (v) => PAD.t + h - ((v - ylo) / (yhi - ylo || 1)) * h;
  ctx.strokeStyle = "#000";
  ctx.strokeRect(PAD.l, PAD.t, w, h);
  ctx.fillStyle = "#000";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  for (let k = 0; k <= 5; k++) {
    const v = xlo + ((xhi - xlo) * k) / 5;
    ctx.fillText(+v.toPrecision(3), X(v), PAD.t + h + 14);
  }
  ctx.fillText(xlabel, PAD.l + w / 2, canvas.height - 4);
  ctx.textAlign = "right";
  for (let k = 0; k <= 4; k++) {
    const v = ylo + ((yhi - ylo) * k) / 4;
    ctx.fillText(+v.toPrecision(3), PAD.l - 4, Y(v) + 4);
  }
  ctx.save();
  ctx.translate(12, PAD.t + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = "center";
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { ctx, X, Y, w, h };
}

function polyline(ctx, xs, ys, X, Y, colour) {
  ctx.strokeStyle = colour;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let pen = false;
  xs.forEach((x, k) => {
    if (!Number.isFinite(ys[k])) {
      pen = false;
      return;
    }
    pen ? ctx.lineTo(X(x), Y(ys[k])) : ctx.moveTo(X(x), Y(ys[k]));
    pen = true;
  });
  ctx.stroke();
}

let mapAxes = null;

function drawMap() {
  const m = model();
  const t0 = performance.now();
  const map = stability_map(num("slo"), num("shi"), Math.round(num("ns")), num("dhi"), Math.round(num("nd")), m.immersion, m.steps, m.zoh);
  const speeds = map.speeds();
  const depths = map.depths_mm();
  const radius = map.radius();
  const boundary = map.boundary_mm();
  map.free();
  const nd = depths.length;
  const f = frame($("map"), speeds[0], speeds[speeds.length - 1], 0, depths[nd - 1], "spindle speed (rpm)", "a_p (mm)");
  const dx = f.w / Math.max(speeds.length - 1, 1);
  const dy = f.h / Math.max(nd - 1, 1);
  speeds.forEach((s, i) => {
    depths.forEach((d, j) => {
      const rho = radius[i * nd + j];
      // stable cells shade by margin, unstable cells stay light
      const shade = !Number.isFinite(rho) ? "#bdbdbd" : rho < 1 ? `hsl(210, 60%, ${30 + 50 * rho}%)` : "#fbe9e7";
      f.ctx.fillStyle = shade;
      f.ctx.fillRect(f.X(s) - dx / 2, f.Y(d) - dy / 2, dx + 1, dy + 1);
    });
  });
  polyline(f.ctx, speeds, boundary, f.X, f.Y, "#000");
  mapAxes = { ...f, xlo: speeds[0], xhi: speeds[speeds.length - 1], yhi: depths[nd - 1] };
  status(`lobe map: ${speeds.length * nd} cells in ${(performance.now() - t0).toFixed(0)} ms`);
}

function drawSle() {
  const m = model();
  const lo = num("slo");
  const hi = num("shi");
  const n = 200;
  const sle = sle_curve(lo, hi, n, num("sdepth"), m.immersion, m.steps, m.zoh);
  const speeds = Array.from({ length: n }, (_, k) => lo + ((hi - lo) * k) / (n - 1));
  const finite = sle.filter(Number.isFinite);
  if (finite.length === 0) {
    frame($("sle"), lo, hi, 0, 1, "spindle speed (rpm)", "SLE (µm)");
    status("every speed chatters at this depth");
    return;
  }
  const ylo = Math.min(0, ...finite);
  const yhi = Math.max(0, ...finite);
  const f = frame($("sle"), lo, hi, ylo, yhi, "spindle speed (rpm)", "SLE (µm)");
  polyline(f.ctx, speeds, Array.from(sle), f.X, f.Y, "#1565c0");
  status(`SLE: ${finite.length} of ${n} speeds stable`);
}

function drawVibration() {
  const m = model();
  const out = vibration_profile(num("vspeed"), num("vdepth"), m.immersion, m.steps, m.zoh);
  const sle = out[out.length - 1];
  const n = (out.length - 1) / 2;
  const x = [];
  const y = [];
  for (let k = 0; k < n; k++) {
    x.push(out[2 * k]);
    y.push(out[2 * k + 1]);
  }
  const t = x.map((_, k) => k / n);
  const all = x.concat(y);
  const f = frame($("vib"), 0, 1, Math.min(...all), Math.max(...all), "fraction of tooth period", "displacement (µm)");
  polyline(f.ctx, t, x, f.X, f.Y, "#c62828");
  polyline(f.ctx, t, y, f.X, f.Y, "#2e7d32");
  f.ctx.textAlign = "left";
  f.ctx.fillStyle = "#c62828";
  f.ctx.fillText("x", PAD.l + 8, PAD.t + 14);
  f.ctx.fillStyle = "#2e7d32";
  f.ctx.fillText("y", PAD.l + 22, PAD.t + 14);
  status(`vibration at ${num("vspeed")} rpm, ${num("vdepth")} mm: SLE ${sle.toPrecision(4)} µm`);
}

function guarded(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      status(String(e.message ?? e), true);
    }
  };
}

await init();
$("map-go").onclick = guarded(drawMap);
$("sle-go").onclick = guarded(drawSle);
$("vib-go").onclick = guarded(drawVibration);
$("map").onclick = (ev) => {
  if (!mapAxes) return;
  const r = ev.target.getBoundingClientRect();
  const px = ev.clientX - r.left - PAD.l;
  const py = ev.clientY - r.top - PAD.t;
  if (px < 0 || py < 0 || px > mapAxes.w || py > mapAxes.h) return;
  const speed = mapAxes.xlo + (px / mapAxes.w) * (mapAxes.xhi - mapAxes.xlo);
  const depth = mapAxes.yhi * (1 - py / mapAxes.h);
  $("vspeed").value = Math.round(speed);
  $("vdepth").value = depth.toFixed(2);
  $("sdepth").value = depth.toFixed(2);
  guarded(drawVibration)();
};
guarded(drawMap)();
guarded(drawSle)();
guarded(drawVibration)();
