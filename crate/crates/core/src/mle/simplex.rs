//! Nelder-Mead downhill simplex in two dimensions.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop when the spread of objective values falls below `ftol * max(1, |f_best|)`...
    pub ftol: f64,
    /// ...and every vertex lies within `xtol` (max-norm) of the best vertex.
    pub xtol: f64,
    pub max_iter: usize,
    /// Edge length of the initial right-angled simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-10,
            xtol: 1e-8,
            max_iter: 2000,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult {
    pub x: [f64; 2],
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f`. Non-finite objective values are treated as `+∞`.
pub fn nelder_mead<F>(f: F, x0: [f64; 2], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn([f64; 2]) -> f64,
{
    let eval = |x: [f64; 2]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts = [
        x0,
        [x0[0] + opts.initial_step, x0[1]],
        [x0[0], x0[1] + opts.initial_step],
    ];
    let mut vals = pts.map(eval);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        // order: best, middle, worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);

        let spread = vals[2] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.ftol * vals[0].abs().max(1.0) && size <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let toward = |k: f64| {
            [
                centroid[0] + k * (pts[2][0] - centroid[0]),
                centroid[1] + k * (pts[2][1] - centroid[1]),
            ]
        };
        let reflected = toward(-1.0);
        let fr = eval(reflected);
        if fr < vals[0] {
            let expanded = toward(-2.0);
            let fe = eval(expanded);
            if fe < fr {
                pts[2] = expanded;
                vals[2] = fe;
            } else {
                pts[2] = reflected;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = reflected;
            vals[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[2] {
            let c = toward(-0.5);
            (c, eval(c))
        } else {
            let c = toward(0.5);
            (c, eval(c))
        };
        if fc < vals[2].min(fr) {
            pts[2] = contracted;
            vals[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for k in 1..3 {
            pts[k] = [
                pts[0][0] + 0.5 * (pts[k][0] - pts[0][0]),
                pts[0][1] + 0.5 * (pts[k][1] - pts[0][1]),
            ];
            vals[k] = eval(pts[k]);
        }
    }

    let best = (0..3)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    SimplexResult {
        x: pts[best],
        fx: vals[best],
        iterations,
        converged,
    }
}
