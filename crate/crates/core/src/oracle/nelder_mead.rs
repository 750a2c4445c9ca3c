//! Derivative-free Nelder–Mead simplex minimization on fixed-size parameter vectors.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Simplex diameter (max norm) below which the search stops.
    pub xtol: f64,
    /// Spread of function values across the simplex below which the search stops.
    pub ftol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub f: f64,
    pub iters: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn lerp<const N: usize>(a: &[f64; N], b: &[f64; N], t: f64) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = a[i] + t * (b[i] - a[i]);
    }
    out
}

/// Minimizes `f` from `x0` with an initial simplex spanned by `step` along each axis.
///
/// Standard coefficients: reflection 1, expansion 2, contraction ½, shrink ½.
/// Non-finite objective values are treated as `+∞`.
pub fn minimize<const N: usize, F>(mut f: F, x0: [f64; N], step: [f64; N], opts: &NelderMeadOptions) -> Minimum<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64; N]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(N + 1);
    pts.push(x0);
    vals.push(eval(&x0));
    for i in 0..N {
        let mut p = x0;
        p[i] += step[i];
        vals.push(eval(&p));
        pts.push(p);
    }

    let mut order: Vec<usize> = (0..=N).collect();
    let mut iters = 0;
    let mut converged = false;
    while iters < opts.max_iters {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (best, worst, second) = (order[0], order[N], order[N - 1]);

        let f_spread = (vals[worst] - vals[best]).abs();
        let x_spread = pts
            .iter()
            .flat_map(|p| p.iter().zip(pts[best].iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        if f_spread <= opts.ftol && x_spread <= opts.xtol {
            converged = true;
            break;
        }
        iters += 1;

        let mut centroid = [0.0; N];
        for &i in &order[..N] {
            for k in 0..N {
                centroid[k] += pts[i][k];
            }
        }
        for c in centroid.iter_mut() {
            *c /= N as f64;
        }

        let reflected = lerp(&centroid, &pts[worst], -1.0);
        let fr = eval(&reflected);
        if fr < vals[best] {
            let expanded = lerp(&centroid, &pts[worst], -2.0);
            let fe = eval(&expanded);
            if fe < fr {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[worst] {
            let p = lerp(&centroid, &pts[worst], -0.5);
            let v = eval(&p);
            (p, v)
        } else {
            let p = lerp(&centroid, &pts[worst], 0.5);
            let v = eval(&p);
            (p, v)
        };
        if fc < vals[worst].min(fr) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best];
        for &i in &order[1..] {
            pts[i] = lerp(&anchor, &pts[i], 0.5);
            vals[i] = eval(&pts[i]);
        }
    }

    let best = (0..=N).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Minimum {
        x: pts[best],
        f: vals[best],
        iters,
        evaluations,
        converged,
    }
}
