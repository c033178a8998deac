//! Small binary64 toolkit: quadrature, adaptive Runge-Kutta, root finding, minimization, fits.

use crate::{Error, Result};

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let d = left + right - whole;
    // The relative floor stops refinement once rounding noise dominates.
    if depth == 0 || d.abs() <= 15.0 * tol.max(1e-14 * (left + right).abs()) || (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
        return left + right + d / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson with Richardson correction, absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split into a few panels first so narrow features are not missed.
    let panels = 8;
    let h = (b - a) / panels as f64;
    let ptol = tol / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        let fa = f(lo);
        let fb = f(hi);
        let fm = f(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        sum += simpson_rec(&f, lo, hi, fa, fm, fb, whole, ptol, 40);
    }
    sum
}

/// Integral over `[a, b]` split at the given interior points.
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    pts.push(b);
    let n = (pts.len() - 1) as f64;
    pts.windows(2).map(|w| integrate(&f, w[0], w[1], tol / n)).sum()
}

/// Bracketed root of a continuous function by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Domain(format!("root not bracketed in [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimization of a unimodal function on `[a, b]`; returns (argmin, min).
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Least-squares line `y = slope·x + intercept`; returns (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fit `y ≈ C·x^α` by regression of logs; returns (α, C).
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let (a, b) = linear_fit(&lx, &ly);
    (a, b.exp())
}

/// Vector field for the integrators: `None` means the state left the domain of the field.
pub type Field<'a> = dyn Fn(f64, &[f64]) -> Option<Vec<f64>> + Sync + 'a;

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns (5th-order state, error norm) or `None` if a stage left the domain.
pub fn dp_step(f: &Field, x: f64, y: &[f64], h: f64) -> Result<Option<(Vec<f64>, f64)>> {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = DP_A[s][j];
            if a != 0.0 {
                for i in 0..n {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        if ys.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        match f(x + DP_C[s] * h, &ys) {
            None => return Ok(None),
            Some(v) => {
                if v.iter().any(|t| t.is_nan()) {
                    return Err(Error::Internal(format!("non-finite vector field at x = {}", x + DP_C[s] * h)));
                }
                if v.iter().any(|t| t.is_infinite()) {
                    return Ok(None);
                }
                k.push(v);
            }
        }
    }
    let mut y5 = y.to_vec();
    let mut err = 0.0f64;
    for i in 0..n {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += DP_B5[s] * k[s][i];
            d4 += DP_B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let scale = 1.0 + y[i].abs().max(y5[i].abs());
        err = err.max((h * (d5 - d4)).abs() / scale);
    }
    Ok(Some((y5, err)))
}

/// Outcome of integrating until the solution stops existing.
#[derive(Clone, Debug)]
pub struct Escape {
    /// Largest abscissa reached.
    pub x: f64,
    /// Final state.
    pub y: Vec<f64>,
    pub steps: usize,
    /// True when the state norm exceeded the threshold; false when it hit the domain boundary.
    pub by_threshold: bool,
}

/// Integrates `y' = f(x, y)` from `x0` until the state exceeds `threshold` in max-norm,
/// the field becomes undefined, or `x_max` is reached (then returns `Err(Domain)`).
/// Near the end the step is halved until it falls below `hmin`, which brackets the escape point.
pub fn escape(f: &Field, x0: f64, y0: &[f64], threshold: f64, tol: f64, x_max: f64) -> Result<Escape> {
    let hmin = 1e-13;
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut h: f64 = 1e-3;
    let mut steps = 0usize;
    while steps < 10_000_000 {
        if x >= x_max {
            return Err(Error::Domain(format!("no escape before x = {x_max}")));
        }
        let h_eff = h.min(x_max - x);
        match dp_step(f, x, &y, h_eff)? {
            None => {
                if h_eff < hmin * (1.0 + x.abs()) {
                    return Ok(Escape { x, y, steps, by_threshold: false });
                }
                h = 0.5 * h_eff;
            }
            Some((y5, err)) => {
                if err <= tol {
                    x += h_eff;
                    y = y5;
                    steps += 1;
                    if y.iter().any(|v| v.abs() > threshold) {
                        return Ok(Escape { x, y, steps, by_threshold: true });
                    }
                    let fac = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
                    h = h_eff * fac;
                } else {
                    if h_eff < hmin * (1.0 + x.abs()) {
                        return Ok(Escape { x, y, steps, by_threshold: false });
                    }
                    h = h_eff * (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
                }
            }
        }
    }
    Err(Error::Resource("step budget exhausted".into()))
}

/// Integrates from `x0` to `x1` (no escape expected); returns the final state.
pub fn integrate_ode(f: &Field, x0: f64, y0: &[f64], x1: f64, tol: f64) -> Result<Vec<f64>> {
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut h: f64 = ((x1 - x0) / 100.0).max(1e-6);
    let mut steps = 0usize;
    while x < x1 {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Resource("step budget exhausted".into()));
        }
        let h_eff = h.min(x1 - x);
        match dp_step(f, x, &y, h_eff)? {
            None => return Err(Error::Domain(format!("solution leaves the domain near x = {x}"))),
            Some((y5, err)) => {
                if err <= tol {
                    x += h_eff;
                    y = y5;
                    let fac = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
                    h = h_eff * fac;
                } else {
                    if h_eff < 1e-14 {
                        return Err(Error::Domain(format!("step underflow near x = {x}")));
                    }
                    h = h_eff * (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
                }
            }
        }
    }
    Ok(y)
}
