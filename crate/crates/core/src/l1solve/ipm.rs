//! Mehrotra predictor–corrector interior-point method for split-variable ℓ1 LPs
//!
//! ```text
//!   minimise  Σ_j w_j (u_j + v_j)
//!   subject to G(u − v) + B z = b,   u, v ≥ 0,   z free
//! ```
//!
//! Basis pursuit is `G = F` with no free block; (weighted) least absolute
//! deviation is `G = I`, `B = A`. The normal matrix collapses to
//! `G diag(d_u + d_v) Gᵀ`, which is diagonal in the regression case.

use crate::linalg::{dot, numerical_rank, DenseMatrix};

pub(crate) enum Coupling<'a> {
    Identity(usize),
    Dense(&'a DenseMatrix),
}

impl Coupling<'_> {
    fn rows(&self) -> usize {
        match self {
            Coupling::Identity(n) => *n,
            Coupling::Dense(g) => g.rows(),
        }
    }

    fn cols(&self) -> usize {
        match self {
            Coupling::Identity(n) => *n,
            Coupling::Dense(g) => g.cols(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Coupling::Identity(_) => x.to_vec(),
            Coupling::Dense(g) => g.matvec(x).into_vec(),
        }
    }

    fn apply_t(&self, y: &[f64]) -> Vec<f64> {
        match self {
            Coupling::Identity(_) => y.to_vec(),
            Coupling::Dense(g) => g.tr_matvec(y).into_vec(),
        }
    }

    /// `G diag(d) Gᵀ`, row-major.
    fn normal(&self, d: &[f64]) -> Vec<f64> {
        match self {
            Coupling::Identity(n) => {
                let mut m = vec![0.0; n * n];
                for i in 0..*n {
                    m[i * n + i] = d[i];
                }
                m
            }
            Coupling::Dense(g) => {
                let (m, p) = g.shape();
                let mut scaled = vec![0.0; m * p];
                for i in 0..m {
                    for (k, gk) in g.row(i).iter().enumerate() {
                        scaled[i * p + k] = gk * d[k];
                    }
                }
                let mut out = vec![0.0; m * m];
                for i in 0..m {
                    let si = &scaled[i * p..(i + 1) * p];
                    for j in 0..=i {
                        let v = dot(si, g.row(j));
                        out[i * m + j] = v;
                        out[j * m + i] = v;
                    }
                }
                out
            }
        }
    }
}

pub(crate) struct SplitLp<'a> {
    pub coupling: Coupling<'a>,
    pub free: Option<&'a DenseMatrix>,
    pub weights: &'a [f64],
    pub rhs: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct IpmSolution {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub z: Vec<f64>,
    pub lambda: Vec<f64>,
    pub s_u: Vec<f64>,
    pub s_v: Vec<f64>,
    pub iterations: usize,
}

impl IpmSolution {
    /// Split indices whose primal part dominates its slack at the final iterate.
    pub fn positive_set(&self) -> Vec<usize> {
        (0..self.u.len()).filter(|&j| self.u[j] > self.s_u[j] || self.v[j] > self.s_v[j]).collect()
    }

    pub fn difference(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(a, b)| a - b).collect()
    }
}

/// Cholesky that replaces collapsing pivots by a huge value, which zeroes the
/// corresponding solution component instead of failing on the rank-deficient
/// normal matrices that appear near degenerate optima.
struct TolerantCholesky {
    n: usize,
    l: Vec<f64>,
}

impl TolerantCholesky {
    fn factor(mut a: Vec<f64>, n: usize) -> Self {
        let max_diag = (0..n).fold(0.0_f64, |m, i| m.max(a[i * n + i]));
        let floor = max_diag * 1e-30;
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            let skip = d.is_nan() || d <= floor;
            let d = if skip { 1e128 } else { d.sqrt() };
            a[j * n + j] = d;
            for i in j + 1..n {
                if skip {
                    a[i * n + j] = 0.0;
                    continue;
                }
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        Self { n, l: a }
    }

    // forward then back substitution reads most clearly with explicit indices
    #[allow(clippy::needless_range_loop)]
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

struct Newton<'a> {
    lp: &'a SplitLp<'a>,
    d_u: Vec<f64>,
    d_v: Vec<f64>,
    chol: TolerantCholesky,
    // M⁻¹B column-major and the Cholesky of BᵀM⁻¹B
    minv_b: Vec<Vec<f64>>,
    schur: Option<TolerantCholesky>,
}

struct Direction {
    du: Vec<f64>,
    dv: Vec<f64>,
    dz: Vec<f64>,
    dl: Vec<f64>,
    dsu: Vec<f64>,
    dsv: Vec<f64>,
}

impl<'a> Newton<'a> {
    fn new(lp: &'a SplitLp<'a>, it: &Iterate) -> Self {
        let d_u: Vec<f64> = it.u.iter().zip(&it.s_u).map(|(x, s)| x / s).collect();
        let d_v: Vec<f64> = it.v.iter().zip(&it.s_v).map(|(x, s)| x / s).collect();
        let d: Vec<f64> = d_u.iter().zip(&d_v).map(|(a, b)| a + b).collect();
        let m = lp.coupling.rows();
        let chol = TolerantCholesky::factor(lp.coupling.normal(&d), m);
        let (minv_b, schur) = match lp.free {
            Some(b) if b.cols() > 0 => {
                let nz = b.cols();
                let minv_b: Vec<Vec<f64>> = (0..nz).map(|j| chol.solve(&b.column(j))).collect();
                let mut k = vec![0.0; nz * nz];
                for i in 0..nz {
                    let bi = b.column(i);
                    for j in 0..nz {
                        k[i * nz + j] = dot(&bi, &minv_b[j]);
                    }
                }
                // symmetrise against roundoff
                for i in 0..nz {
                    for j in 0..i {
                        let avg = 0.5 * (k[i * nz + j] + k[j * nz + i]);
                        k[i * nz + j] = avg;
                        k[j * nz + i] = avg;
                    }
                }
                (minv_b, Some(TolerantCholesky::factor(k, nz)))
            }
            _ => (Vec::new(), None),
        };
        Self { lp, d_u, d_v, chol, minv_b, schur }
    }

    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        it: &Iterate,
        rp: &[f64],
        rd_u: &[f64],
        rd_v: &[f64],
        rf: &[f64],
        rc_u: &[f64],
        rc_v: &[f64],
    ) -> Direction {
        let p = it.u.len();
        let tu: Vec<f64> = (0..p).map(|j| rc_u[j] / it.s_u[j] - self.d_u[j] * rd_u[j]).collect();
        let tv: Vec<f64> = (0..p).map(|j| rc_v[j] / it.s_v[j] - self.d_v[j] * rd_v[j]).collect();
        let diff: Vec<f64> = tu.iter().zip(&tv).map(|(a, b)| a - b).collect();
        let g_diff = self.lp.coupling.apply(&diff);
        let h: Vec<f64> = rp.iter().zip(&g_diff).map(|(a, b)| a - b).collect();
        let minv_h = self.chol.solve(&h);

        let (dz, dl) = match (self.lp.free, &self.schur) {
            (Some(b), Some(schur)) => {
                let bt_minv_h = b.tr_matvec(&minv_h);
                let rhs: Vec<f64> = bt_minv_h.iter().zip(rf).map(|(a, c)| a - c).collect();
                let dz = schur.solve(&rhs);
                let mut dl = minv_h;
                for (j, dzj) in dz.iter().enumerate() {
                    for (x, mb) in dl.iter_mut().zip(&self.minv_b[j]) {
                        *x -= dzj * mb;
                    }
                }
                (dz, dl)
            }
            _ => (Vec::new(), minv_h),
        };

        let gt_dl = self.lp.coupling.apply_t(&dl);
        let du: Vec<f64> = (0..p).map(|j| tu[j] + self.d_u[j] * gt_dl[j]).collect();
        let dv: Vec<f64> = (0..p).map(|j| tv[j] - self.d_v[j] * gt_dl[j]).collect();
        let dsu: Vec<f64> = (0..p).map(|j| rd_u[j] - gt_dl[j]).collect();
        let dsv: Vec<f64> = (0..p).map(|j| rd_v[j] + gt_dl[j]).collect();
        Direction { du, dv, dz, dl, dsu, dsv }
    }
}

#[derive(Clone)]
struct Iterate {
    u: Vec<f64>,
    v: Vec<f64>,
    z: Vec<f64>,
    lambda: Vec<f64>,
    s_u: Vec<f64>,
    s_v: Vec<f64>,
}

fn max_step(x: &[f64], dx: &[f64]) -> f64 {
    x.iter().zip(dx).filter(|(_, d)| **d < 0.0).fold(1.0_f64, |a, (xi, di)| a.min(-xi / di))
}

fn norm(v: &[f64]) -> f64 {
    crate::linalg::norm2(v)
}

fn starting_point(lp: &SplitLp) -> Iterate {
    let m = lp.coupling.rows();
    let p = lp.coupling.cols();
    let nz = lp.free.map_or(0, DenseMatrix::cols);
    // Mehrotra's heuristic: least-norm primal point, least-squares dual, then shift.
    let ggt = TolerantCholesky::factor(lp.coupling.normal(&vec![2.0; p]), m);
    let q = ggt.solve(lp.rhs);
    let gq = lp.coupling.apply_t(&q);
    let mut u = gq.clone();
    let mut v: Vec<f64> = gq.iter().map(|x| -x).collect();
    let mut s_u = lp.weights.to_vec();
    let mut s_v = lp.weights.to_vec();

    let min_x = u.iter().chain(&v).fold(f64::INFINITY, |a, b| a.min(*b));
    let dx = (-1.5 * min_x).max(0.0);
    let min_s = s_u.iter().chain(&s_v).fold(f64::INFINITY, |a, b| a.min(*b));
    let ds = (-1.5 * min_s).max(0.0);
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x += dx);
    s_u.iter_mut().chain(s_v.iter_mut()).for_each(|s| *s += ds);
    let xs: f64 = dot(&u, &s_u) + dot(&v, &s_v);
    let sum_x: f64 = u.iter().chain(&v).sum();
    let sum_s: f64 = s_u.iter().chain(&s_v).sum();
    let shift_x = 0.5 * xs / sum_s;
    let shift_s = 0.5 * xs / sum_x.max(f64::MIN_POSITIVE);
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x += shift_x);
    s_u.iter_mut().chain(s_v.iter_mut()).for_each(|s| *s += shift_s);

    let scale = lp.rhs.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
    let floor = 1e-2 * scale;
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x = x.max(floor));
    let wmax = lp.weights.iter().fold(0.0_f64, |a, b| a.max(*b));
    s_u.iter_mut().chain(s_v.iter_mut()).for_each(|s| *s = s.max(1e-2 * wmax.max(1.0)));

    Iterate { u, v, z: vec![0.0; nz], lambda: vec![0.0; m], s_u, s_v }
}

pub(crate) fn solve(lp: &SplitLp, tol: f64, max_iter: usize) -> IpmSolution {
    let p = lp.coupling.cols();
    let w = lp.weights;
    let b = lp.rhs;
    let b_norm = norm(b);
    let w_norm = norm(w);
    let mut it = starting_point(lp);
    let mut iterations = 0;
    // Past the attainable accuracy the iterates can drift away again, so the
    // best one seen is what gets returned.
    let mut best: Option<(f64, Iterate)> = None;

    // one extra pass scores the final iterate without stepping
    for k in 0..=max_iter {
        iterations = k;
        let diff: Vec<f64> = it.u.iter().zip(&it.v).map(|(a, c)| a - c).collect();
        let mut rp: Vec<f64> = lp.coupling.apply(&diff);
        if let Some(bm) = lp.free {
            let bz = bm.matvec(&it.z);
            rp.iter_mut().zip(bz.iter()).for_each(|(r, x)| *r += x);
        }
        rp.iter_mut().zip(b).for_each(|(r, bi)| *r = bi - *r);
        let gt = lp.coupling.apply_t(&it.lambda);
        let rd_u: Vec<f64> = (0..p).map(|j| w[j] - gt[j] - it.s_u[j]).collect();
        let rd_v: Vec<f64> = (0..p).map(|j| w[j] + gt[j] - it.s_v[j]).collect();
        let rf: Vec<f64> = match lp.free {
            Some(bm) => bm.tr_matvec(&it.lambda).iter().map(|x| -x).collect(),
            None => Vec::new(),
        };
        let pobj = dot(w, &it.u) + dot(w, &it.v);
        let dobj = dot(b, &it.lambda);
        let mu = (dot(&it.u, &it.s_u) + dot(&it.v, &it.s_v)) / (2 * p) as f64;

        let primal = norm(&rp) / (1.0 + b_norm);
        let dual = (norm(&rd_u) + norm(&rd_v) + norm(&rf)) / (1.0 + w_norm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        let merit = primal.max(dual).max(gap);
        match &best {
            Some((m, _)) if *m <= merit => {
                if *m < 1e-6 && merit > 1e3 * m {
                    break;
                }
            }
            _ => best = Some((merit, it.clone())),
        }
        if merit <= tol || k == max_iter {
            break;
        }
        if !mu.is_finite() || mu < 1e-300 {
            break;
        }

        let newton = Newton::new(lp, &it);
        let rc_u: Vec<f64> = (0..p).map(|j| -it.u[j] * it.s_u[j]).collect();
        let rc_v: Vec<f64> = (0..p).map(|j| -it.v[j] * it.s_v[j]).collect();
        let aff = newton.solve(&it, &rp, &rd_u, &rd_v, &rf, &rc_u, &rc_v);
        let ap = max_step(&it.u, &aff.du).min(max_step(&it.v, &aff.dv));
        let ad = max_step(&it.s_u, &aff.dsu).min(max_step(&it.s_v, &aff.dsv));
        let mu_aff = (0..p)
            .map(|j| {
                (it.u[j] + ap * aff.du[j]) * (it.s_u[j] + ad * aff.dsu[j])
                    + (it.v[j] + ap * aff.dv[j]) * (it.s_v[j] + ad * aff.dsv[j])
            })
            .sum::<f64>()
            / (2 * p) as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        let rc_u: Vec<f64> = (0..p).map(|j| sigma * mu - it.u[j] * it.s_u[j] - aff.du[j] * aff.dsu[j]).collect();
        let rc_v: Vec<f64> = (0..p).map(|j| sigma * mu - it.v[j] * it.s_v[j] - aff.dv[j] * aff.dsv[j]).collect();
        let dir = newton.solve(&it, &rp, &rd_u, &rd_v, &rf, &rc_u, &rc_v);
        let eta = (1.0 - mu).clamp(0.9, 0.999);
        let ap = (eta * max_step(&it.u, &dir.du).min(max_step(&it.v, &dir.dv))).min(1.0);
        let ad = (eta * max_step(&it.s_u, &dir.dsu).min(max_step(&it.s_v, &dir.dsv))).min(1.0);
        if ap < 1e-14 && ad < 1e-14 {
            break;
        }

        let step = |x: &mut Vec<f64>, d: &[f64], a: f64| {
            x.iter_mut().zip(d).for_each(|(xi, di)| *xi += a * di);
        };
        step(&mut it.u, &dir.du, ap);
        step(&mut it.v, &dir.dv, ap);
        step(&mut it.z, &dir.dz, ap);
        step(&mut it.lambda, &dir.dl, ad);
        step(&mut it.s_u, &dir.dsu, ad);
        step(&mut it.s_v, &dir.dsv, ad);
        // keep strictly interior against roundoff
        for x in it.u.iter_mut().chain(it.v.iter_mut()).chain(it.s_u.iter_mut()).chain(it.s_v.iter_mut()) {
            if *x <= 0.0 {
                *x = f64::MIN_POSITIVE;
            }
        }
        iterations = k + 1;
    }
    if let Some((_, b)) = best {
        it = b;
    }
    IpmSolution { u: it.u, v: it.v, z: it.z, lambda: it.lambda, s_u: it.s_u, s_v: it.s_v, iterations }
}

/// True when the optimal face at the IPM limit has positive dimension, i.e.
/// the columns of `[G_P | B]` over the positive set `P` are linearly dependent.
pub(crate) fn optimal_face_is_degenerate(lp: &SplitLp, sol: &IpmSolution) -> bool {
    let pos = sol.positive_set();
    let m = lp.coupling.rows();
    let nz = lp.free.map_or(0, DenseMatrix::cols);
    let width = pos.len() + nz;
    if width == 0 {
        return false;
    }
    if width > m {
        return true;
    }
    match (&lp.coupling, lp.free) {
        (Coupling::Identity(n), Some(bm)) => {
            // [I_P | B] loses rank exactly when B restricted to rows outside P does
            let rest: Vec<usize> = (0..*n).filter(|i| !pos.contains(i)).collect();
            if rest.len() < nz {
                return true;
            }
            numerical_rank(&bm.select_rows(&rest)).map_or(true, |r| r < nz)
        }
        (Coupling::Identity(_), None) => false,
        (Coupling::Dense(g), free) => {
            let mut cols = g.select_columns(&pos);
            if let Some(bm) = free {
                cols = cols.hstack(bm);
            }
            numerical_rank(&cols).map_or(true, |r| r < width)
        }
    }
}
