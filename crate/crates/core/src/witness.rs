//! Numerical search for a symplectic map between two forms on the same orbit.
//!
//! Minimizes `R(A) = |pullback(F_c exp(A), dst) - src|^2` over `A` in `sp(6)`
//! with BFGS (finite-difference gradient with Richardson extrapolation),
//! recentering `F_c` after every accepted step, followed by a
//! Levenberg–Marquardt polish using the exact Lie-derivative Jacobian.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::classify;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::Mat;
use crate::multilinear::{blades, KForm};
use crate::stabilizer::sp_basis;
use crate::symplectic::symplectic_defect;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Iteration cap for the quasi-Newton phase.
    pub max_iterations: usize,
    /// Iteration cap for the least-squares polish.
    pub polish_iterations: usize,
    /// Gradient-norm stopping tolerance.
    pub tolerance: f64,
    /// Entry scale of the random starting points (restart 0 starts at the identity).
    pub initial_scale: f64,
    /// Base finite-difference step.
    pub fd_step: f64,
    /// Residual and defect thresholds for acceptance.
    pub accept_residual: f64,
    pub accept_defect: f64,
    /// Restarts evaluated per batch; the search stops after the first batch
    /// that contains a converged run.
    pub batch: usize,
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            seed: 0,
            restarts: 16,
            max_iterations: 60,
            polish_iterations: 200,
            tolerance: 1e-10,
            initial_scale: 0.5,
            fd_step: 1e-3,
            accept_residual: 1e-8,
            accept_defect: 1e-10,
            batch: 4,
            execution: Execution::available(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WitnessResult {
    /// `F` with `pullback(F, dst) ~ src`.
    pub map: Mat<f64>,
    pub residual: f64,
    pub defect: f64,
    pub converged: bool,
    pub restarts_used: usize,
    /// Index of the restart that produced `map`.
    pub best_restart: usize,
}

type M6 = [[f64; 6]; 6];
type F20 = [f64; 20];

struct Dense {
    triples: Vec<[usize; 3]>,
    sp: Vec<M6>,
}

impl Dense {
    fn new() -> Self {
        let triples = blades(6, 3)
            .into_iter()
            .map(|b| {
                let i = b.indices();
                [i[0] - 1, i[1] - 1, i[2] - 1]
            })
            .collect();
        let sp = sp_basis::<f64>().iter().map(to_m6).collect();
        Dense { triples, sp }
    }

    fn pull(&self, f: &M6, w: &F20) -> F20 {
        let mut out = [0.0; 20];
        for (a, ia) in self.triples.iter().enumerate() {
            if w[a] == 0.0 {
                continue;
            }
            for (b, jb) in self.triples.iter().enumerate() {
                out[b] += w[a] * minor3(f, ia, jb);
            }
        }
        out
    }

    /// Slot-sum Lie derivative `L_X w`.
    fn lie(&self, x: &M6, w: &F20) -> F20 {
        let mut out = [0.0; 20];
        let id = identity6();
        for (a, ia) in self.triples.iter().enumerate() {
            if w[a] == 0.0 {
                continue;
            }
            for (b, jb) in self.triples.iter().enumerate() {
                let mut d = 0.0;
                for p in 0..3 {
                    let row = |r: usize, c: usize| {
                        if r == p {
                            x[ia[r]][jb[c]]
                        } else {
                            id[ia[r]][jb[c]]
                        }
                    };
                    d += det3(row);
                }
                out[b] += w[a] * d;
            }
        }
        out
    }

    fn algebra(&self, coords: &[f64]) -> M6 {
        let mut m = [[0.0; 6]; 6];
        for (x, c) in self.sp.iter().zip(coords) {
            if *c == 0.0 {
                continue;
            }
            for i in 0..6 {
                for j in 0..6 {
                    m[i][j] += c * x[i][j];
                }
            }
        }
        m
    }
}

fn identity6() -> M6 {
    let mut m = [[0.0; 6]; 6];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn det3(m: impl Fn(usize, usize) -> f64) -> f64 {
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

fn minor3(f: &M6, rows: &[usize; 3], cols: &[usize; 3]) -> f64 {
    det3(|r, c| f[rows[r]][cols[c]])
}

fn to_m6(m: &Mat<f64>) -> M6 {
    let mut out = [[0.0; 6]; 6];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    out
}

fn from_m6(m: &M6) -> Mat<f64> {
    Mat::from_fn(6, 6, |i, j| m[i][j])
}

fn mul6(a: &M6, b: &M6) -> M6 {
    let mut out = [[0.0; 6]; 6];
    for i in 0..6 {
        for k in 0..6 {
            let x = a[i][k];
            if x == 0.0 {
                continue;
            }
            for j in 0..6 {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

/// Matrix exponential by scaling and squaring of a Taylor polynomial.
pub fn expm(a: &Mat<f64>) -> Mat<f64> {
    assert!(a.is_square());
    if a.rows() == 6 {
        return from_m6(&expm6(&to_m6(a)));
    }
    let n = a.rows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale(&2f64.powi(-s));
    let mut term = Mat::identity(n);
    let mut sum = Mat::identity(n);
    for k in 1..=20 {
        term = term.mul(&b).scale(&(1.0 / k as f64));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

fn expm6(a: &M6) -> M6 {
    let norm = (0..6)
        .map(|j| (0..6).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let f = 2f64.powi(-s);
    let mut b = *a;
    for row in b.iter_mut() {
        for x in row.iter_mut() {
            *x *= f;
        }
    }
    let mut term = identity6();
    let mut sum = identity6();
    for k in 1..=20 {
        term = mul6(&term, &b);
        let inv = 1.0 / k as f64;
        for i in 0..6 {
            for j in 0..6 {
                term[i][j] *= inv;
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mul6(&sum, &sum);
    }
    sum
}

fn random_algebra(rng: &mut ChaCha8Rng, scale: f64) -> M6 {
    let mut u = || rng.random_range(-scale..=scale);
    let mut m = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let b = u();
            m[i][j] = b;
            m[3 + j][3 + i] = -b;
        }
    }
    for (ro, co) in [(0, 3), (3, 0)] {
        for i in 0..3 {
            for j in i..3 {
                let s = u();
                m[ro + i][co + j] = s;
                m[ro + j][co + i] = s;
            }
        }
    }
    m
}

/// `exp` of a random `sp(6)` element with entries uniform in `[-scale, scale]`.
pub fn random_sp(seed: u64, scale: f64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    from_m6(&expm6(&random_algebra(&mut rng, scale)))
}

fn to_f20(w: &KForm<f64>) -> F20 {
    let mut out = [0.0; 20];
    out.copy_from_slice(&w.to_dense());
    out
}

struct Problem<'a> {
    dense: &'a Dense,
    src: F20,
    dst: F20,
}

impl Problem<'_> {
    fn residual_vec(&self, f: &M6) -> F20 {
        let p = self.dense.pull(f, &self.dst);
        let mut r = [0.0; 20];
        for k in 0..20 {
            r[k] = p[k] - self.src[k];
        }
        r
    }

    fn objective(&self, fc: &M6, coords: &[f64]) -> f64 {
        let f = mul6(fc, &expm6(&self.dense.algebra(coords)));
        self.residual_vec(&f).iter().map(|x| x * x).sum()
    }

    fn central(&self, fc: &M6, h: f64) -> Vec<f64> {
        let mut g = vec![0.0; 21];
        let mut x = vec![0.0; 21];
        for k in 0..21 {
            x[k] = h;
            let fp = self.objective(fc, &x);
            x[k] = -h;
            let fm = self.objective(fc, &x);
            x[k] = 0.0;
            g[k] = (fp - fm) / (2.0 * h);
        }
        g
    }

    /// Richardson-extrapolated central differences at `A = 0`.
    fn gradient(&self, fc: &M6, h: f64) -> Vec<f64> {
        let d1 = self.central(fc, h);
        let d2 = self.central(fc, h / 2.0);
        d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
    }

    fn bfgs(&self, mut fc: M6, opts: &SolverOptions) -> M6 {
        let n = 21;
        let mut hinv = vec![vec![0.0; n]; n];
        for (i, row) in hinv.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mut f0 = self.objective(&fc, &[0.0; 21]);
        let mut g = self.gradient(&fc, opts.fd_step);
        for _ in 0..opts.max_iterations {
            let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gnorm < opts.tolerance || f0 < 1e-24 {
                break;
            }
            let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| hinv[i][j] * g[j]).sum::<f64>()).collect();
            let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            if slope >= 0.0 {
                for (i, row) in hinv.iter_mut().enumerate() {
                    row.iter_mut().for_each(|x| *x = 0.0);
                    row[i] = 1.0;
                }
                d = g.iter().map(|x| -x).collect();
                slope = -gnorm * gnorm;
            }
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let x: Vec<f64> = d.iter().map(|di| t * di).collect();
                let f1 = self.objective(&fc, &x);
                if f1 <= f0 + 1e-4 * t * slope {
                    accepted = Some((x, f1));
                    break;
                }
                t *= 0.5;
            }
            let Some((s, f1)) = accepted else { break };
            fc = mul6(&fc, &expm6(&self.dense.algebra(&s)));
            let g1 = self.gradient(&fc, opts.fd_step);
            let y: Vec<f64> = g1.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            if sy > 1e-16 {
                let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| hinv[i][j] * y[j]).sum()).collect();
                let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
                let rho = 1.0 / sy;
                for i in 0..n {
                    for j in 0..n {
                        hinv[i][j] += (1.0 + yhy * rho) * rho * s[i] * s[j]
                            - rho * (hy[i] * s[j] + s[i] * hy[j]);
                    }
                }
            }
            f0 = f1;
            g = g1;
        }
        fc
    }

    fn polish(&self, mut fc: M6, opts: &SolverOptions) -> M6 {
        let mut r = self.residual_vec(&fc);
        let mut f0: f64 = r.iter().map(|x| x * x).sum();
        let mut mu = 1e-3;
        for _ in 0..opts.polish_iterations {
            if f0 < 1e-28 {
                break;
            }
            let wc = self.dense.pull(&fc, &self.dst);
            let cols: Vec<F20> = self.dense.sp.iter().map(|x| self.dense.lie(x, &wc)).collect();
            let jtj = Mat::from_fn(21, 21, |a, b| (0..20).map(|k| cols[a][k] * cols[b][k]).sum::<f64>());
            let jtr: Vec<f64> = (0..21).map(|a| -(0..20).map(|k| cols[a][k] * r[k]).sum::<f64>()).collect();
            let mut improved = false;
            for _ in 0..12 {
                let mut sys = jtj.clone();
                for a in 0..21 {
                    sys[(a, a)] += mu * (1.0 + jtj[(a, a)]);
                }
                let Some(step) = sys.solve(&jtr) else {
                    mu *= 10.0;
                    continue;
                };
                let cand = mul6(&fc, &expm6(&self.dense.algebra(&step)));
                let rc = self.residual_vec(&cand);
                let f1: f64 = rc.iter().map(|x| x * x).sum();
                if f1 < f0 {
                    fc = cand;
                    r = rc;
                    f0 = f1;
                    mu = (mu / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        fc
    }
}

/// Search for `F` in `Sp(6)` with `pullback(F, dst) = src`.
pub fn solve_conjugacy(src: &KForm<f64>, dst: &KForm<f64>, opts: &SolverOptions) -> Result<WitnessResult> {
    if opts.restarts == 0 || !(opts.tolerance > 0.0) {
        return Err(Error::Precondition("restarts >= 1 and tolerance > 0 required".into()));
    }
    let fs = classify(src)?.family;
    let fd = classify(dst)?.family;
    if fs != fd {
        return Err(Error::FamilyMismatch { src: fs, dst: fd });
    }
    let dense = Dense::new();
    let problem = Problem {
        dense: &dense,
        src: to_f20(src),
        dst: to_f20(dst),
    };
    let run = |r: usize| -> WitnessResult {
        let start = if r == 0 {
            identity6()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            expm6(&random_algebra(&mut rng, opts.initial_scale))
        };
        let fc = problem.bfgs(start, opts);
        let fc = problem.polish(fc, opts);
        let residual = problem
            .residual_vec(&fc)
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let map = from_m6(&fc);
        let defect = symplectic_defect(&map);
        WitnessResult {
            converged: residual < opts.accept_residual && defect < opts.accept_defect,
            map,
            residual,
            defect,
            restarts_used: 0,
            best_restart: r,
        }
    };
    let batch = opts.batch.max(1);
    let mut results: Vec<WitnessResult> = Vec::new();
    let mut next = 0;
    while next < opts.restarts {
        let count = batch.min(opts.restarts - next);
        let base = next;
        let chunk = opts.execution.map(count, |i| run(base + i));
        results.extend(chunk);
        next += count;
        if results.iter().any(|r| r.converged) {
            break;
        }
    }
    let used = results.len();
    // Minimum residual among converged runs, then overall; ties go to the lowest index.
    let pick = |only_converged: bool| {
        results
            .iter()
            .filter(|r| !only_converged || r.converged)
            .min_by(|a, b| {
                a.residual
                    .partial_cmp(&b.residual)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.best_restart.cmp(&b.best_restart))
            })
            .cloned()
    };
    let mut best = pick(true).or_else(|| pick(false)).expect("at least one restart");
    best.restarts_used = used;
    Ok(best)
}
