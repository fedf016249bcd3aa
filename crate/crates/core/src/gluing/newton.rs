use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EquationSystem, GluingError};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Singular values below this fraction of the largest are dropped.
    pub svd_threshold: f64,
    pub max_halvings: usize,
    /// Steps putting a shape this close to 0 or 1 are rejected.
    pub pole_radius: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 100, svd_threshold: 1e-10, max_halvings: 20, pole_radius: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewtonResult {
    pub shapes: Vec<[Complex64; 4]>,
    pub iterations: usize,
    /// ∞-norm of the final log-residual.
    pub residual: f64,
    /// ∞-norm before each iteration, then the final one.
    pub trace: Vec<f64>,
    /// Numerical rank of the Jacobian at the final point.
    pub rank: usize,
    /// Multiples of 2πi removed from each equation at the final point.
    pub windings: Vec<i64>,
}

fn inf_norm(r: &[Complex64]) -> f64 {
    r.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn two_norm(r: &[Complex64]) -> f64 {
    r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn to_shapes(u: &DVector<Complex64>) -> Vec<[Complex64; 4]> {
    (0..u.len() / 4).map(|t| std::array::from_fn(|s| u[4 * t + s].exp())).collect()
}

fn to_logs(shapes: &[[Complex64; 4]]) -> DVector<Complex64> {
    DVector::from_iterator(4 * shapes.len(), shapes.iter().flat_map(|s| s.iter().map(|z| z.ln())))
}

fn near_pole(shapes: &[[Complex64; 4]], radius: f64) -> bool {
    let one = Complex64::new(1.0, 0.0);
    shapes.iter().flatten().any(|z| !z.is_finite() || z.norm() < radius || (z - one).norm() < radius)
}

/// SVD of J padded with zero rows so that every right singular vector is present.
struct Decomp {
    sigma: Vec<f64>,
    u: DMatrix<Complex64>,
    /// Rows are conjugated right singular vectors.
    v_t: DMatrix<Complex64>,
    cutoff: f64,
}

impl Decomp {
    fn new(jac: &DMatrix<Complex64>, threshold: f64) -> Self {
        let (m, n) = jac.shape();
        let padded = if m < n {
            let mut p = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
            p.view_mut((0, 0), (m, n)).copy_from(jac);
            p
        } else {
            jac.clone()
        };
        let svd = padded.svd(true, true);
        let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
        let smax = sigma.iter().copied().fold(0.0, f64::max);
        Decomp { sigma, u: svd.u.unwrap(), v_t: svd.v_t.unwrap(), cutoff: threshold * smax }
    }

    fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.cutoff && s > 0.0).count()
    }

    /// Minimum-norm least-squares solution of J x = b.
    fn solve(&self, b: &[Complex64]) -> DVector<Complex64> {
        let n = self.v_t.ncols();
        let mut bb = DVector::from_element(self.u.nrows(), Complex64::new(0.0, 0.0));
        for (i, v) in b.iter().enumerate() {
            bb[i] = *v;
        }
        let mut x = DVector::from_element(n, Complex64::new(0.0, 0.0));
        for (i, &s) in self.sigma.iter().enumerate() {
            if s <= self.cutoff || s == 0.0 {
                continue;
            }
            let coeff = self.u.column(i).dotc(&bb) / s;
            for c in 0..n {
                x[c] += self.v_t[(i, c)].conj() * coeff;
            }
        }
        x
    }

    /// Orthonormal basis of the numerical kernel, as columns.
    fn kernel(&self) -> DMatrix<Complex64> {
        let n = self.v_t.ncols();
        let idx: Vec<usize> = (0..self.sigma.len()).filter(|&i| self.sigma[i] <= self.cutoff || self.sigma[i] == 0.0).collect();
        DMatrix::from_fn(n, idx.len(), |r, c| self.v_t[(idx[c], r)].conj())
    }
}

/// Damped Gauss-Newton in log-shapes with minimum-norm steps.
pub fn newton_solve(
    sys: &EquationSystem,
    start: &[[Complex64; 4]],
    opts: &NewtonOptions,
) -> Result<NewtonResult, GluingError> {
    let mut u = to_logs(start);
    let mut shapes = start.to_vec();
    let (mut r, mut wind) = sys.residual(&shapes)?;
    let mut trace = vec![];
    for it in 0..=opts.max_iter {
        let norm = inf_norm(&r);
        trace.push(norm);
        if norm < opts.tol || sys.is_empty() {
            let rank = if sys.is_empty() { 0 } else { Decomp::new(&sys.jacobian(&shapes), opts.svd_threshold).rank() };
            return Ok(NewtonResult { shapes, iterations: it, residual: norm, trace, rank, windings: wind });
        }
        if it == opts.max_iter {
            break;
        }
        let dec = Decomp::new(&sys.jacobian(&shapes), opts.svd_threshold);
        let neg: Vec<Complex64> = r.iter().map(|v| -v).collect();
        let delta = dec.solve(&neg);
        if delta.iter().all(|v| v.norm() == 0.0) {
            return Err(GluingError::SingularJacobian { rank: dec.rank() });
        }
        let base = two_norm(&r);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = &u + &delta * Complex64::new(alpha, 0.0);
            let ts = to_shapes(&trial);
            if !near_pole(&ts, opts.pole_radius) {
                if let Ok((tr, tw)) = sys.residual(&ts) {
                    if two_norm(&tr) < base {
                        u = trial;
                        shapes = ts;
                        r = tr;
                        wind = tw;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha /= 2.0;
        }
        if !accepted {
            return Err(GluingError::NoConvergence { iterations: it, residual: norm });
        }
    }
    Err(GluingError::NoConvergence { iterations: opts.max_iter, residual: inf_norm(&r) })
}

/// Random start: log |z| uniform in [−1.5, 1.5], arg uniform.
pub fn random_start(n_tets: usize, seed: u64) -> Vec<[Complex64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_tets)
        .map(|_| {
            std::array::from_fn(|_| {
                Complex64::from_polar(rng.gen_range(-1.5f64..1.5).exp(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionCluster {
    pub representative: Vec<[Complex64; 4]>,
    pub count: usize,
    pub first_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultistartReport {
    pub attempts: usize,
    pub converged: usize,
    pub clusters: Vec<SolutionCluster>,
}

fn shape_distance(a: &[[Complex64; 4]], b: &[[Complex64; 4]]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Independent solves from seeded random starts, clustered by ∞-distance.
pub fn multistart(
    sys: &EquationSystem,
    seeds: &[u64],
    opts: &NewtonOptions,
    radius: f64,
) -> MultistartReport {
    let results: Vec<(u64, Option<NewtonResult>)> = seeds
        .par_iter()
        .map(|&s| (s, newton_solve(sys, &random_start(sys.num_tetrahedra, s), opts).ok()))
        .collect();
    let mut clusters: Vec<SolutionCluster> = vec![];
    let mut converged = 0;
    for (seed, res) in results {
        let Some(res) = res else { continue };
        converged += 1;
        match clusters.iter_mut().find(|c| shape_distance(&c.representative, &res.shapes) < radius) {
            Some(c) => c.count += 1,
            None => clusters.push(SolutionCluster { representative: res.shapes, count: 1, first_seed: seed }),
        }
    }
    MultistartReport { attempts: seeds.len(), converged, clusters }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum TangentSelection {
    /// The k-th kernel vector of the Jacobian.
    Index(usize),
    /// A seeded random unit vector in the kernel.
    Seeded(u64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyOptions {
    pub steps: usize,
    pub step: f64,
    pub tangent: TangentSelection,
    pub newton: NewtonOptions,
}

fn unit(v: DVector<Complex64>) -> DVector<Complex64> {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v / Complex64::new(n, 0.0)
    }
}

/// Predictor along a kernel direction, Newton corrector; the tangent is carried
/// from step to step by projection onto the new kernel.
pub fn continue_family(
    sys: &EquationSystem,
    start: &[[Complex64; 4]],
    opts: &FamilyOptions,
) -> Result<Vec<NewtonResult>, GluingError> {
    let first = newton_solve(sys, start, &opts.newton)?;
    let dec = Decomp::new(&sys.jacobian(&first.shapes), opts.newton.svd_threshold);
    let rank0 = dec.rank();
    let ker = dec.kernel();
    if ker.ncols() == 0 {
        return Err(GluingError::SingularJacobian { rank: rank0 });
    }
    let mut t = match opts.tangent {
        TangentSelection::Index(k) => ker.column(k.min(ker.ncols() - 1)).into_owned(),
        TangentSelection::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = DVector::from_fn(ker.ncols(), |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            unit(&ker * c)
        }
    };
    let mut family = vec![first];
    for _ in 0..opts.steps {
        let cur = family.last().unwrap();
        if opts.step == 0.0 {
            family.push(cur.clone());
            continue;
        }
        let pred = to_logs(&cur.shapes) + &t * Complex64::new(opts.step, 0.0);
        let next = newton_solve(sys, &to_shapes(&pred), &opts.newton)?;
        let dec = Decomp::new(&sys.jacobian(&next.shapes), opts.newton.svd_threshold);
        if dec.rank() != rank0 {
            return Err(GluingError::PathSingular { from: rank0, to: dec.rank() });
        }
        let ker = dec.kernel();
        t = unit(&ker * (ker.adjoint() * &t));
        family.push(next);
    }
    Ok(family)
}

/// Numerical rank of the Jacobian at a point.
pub fn jacobian_rank(sys: &EquationSystem, shapes: &[[Complex64; 4]], threshold: f64) -> usize {
    Decomp::new(&sys.jacobian(shapes), threshold).rank()
}
