//! Closed-form metrics and scalar fields, evaluated generically over [`Real`].
//!
//! Everything here is differentiable to any order by evaluating at nested
//! dual arguments; there is no finite-difference truncation on analytic data.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dual::Real;
use crate::error::GeometryError;

/// A closed-form scalar field on the D-torus (or plane).
pub trait ScalarMap<const D: usize>: Sync {
    fn eval<T: Real>(&self, x: [T; D]) -> T;
}

/// A closed-form Riemannian metric given by its coordinate components.
pub trait MetricMap<const D: usize>: Sync {
    fn eval<T: Real>(&self, x: [T; D]) -> [[T; D]; D];
}

/// One term `c * cos(k . x + phase)`.
#[derive(Clone, Debug)]
pub struct TrigTerm<const D: usize> {
    pub coef: f64,
    pub wave: [f64; D],
    pub phase: f64,
}

/// Real trigonometric polynomial on the D-torus.
#[derive(Clone, Debug, Default)]
pub struct TrigPoly<const D: usize> {
    pub terms: Vec<TrigTerm<D>>,
}

impl<const D: usize> TrigPoly<D> {
    pub fn zero() -> Self {
        TrigPoly { terms: Vec::new() }
    }

    pub fn term(coef: f64, wave: [f64; D], phase: f64) -> Self {
        TrigPoly {
            terms: vec![TrigTerm { coef, wave, phase }],
        }
    }

    pub fn push(&mut self, coef: f64, wave: [f64; D], phase: f64) {
        self.terms.push(TrigTerm { coef, wave, phase });
    }
}

impl<const D: usize> ScalarMap<D> for TrigPoly<D> {
    fn eval<T: Real>(&self, x: [T; D]) -> T {
        let mut acc = T::cst(0.0);
        for t in &self.terms {
            let mut arg = T::cst(t.phase);
            for a in 0..D {
                arg = arg + T::cst(t.wave[a]) * x[a];
            }
            acc = acc + T::cst(t.coef) * arg.cos();
        }
        acc
    }
}

/// `g = delta + perturbation`, each entry a trig polynomial. The workhorse of
/// the identity-check ensembles.
#[derive(Clone, Debug)]
pub struct TrigMetric<const D: usize> {
    /// Upper-triangular entries, row-major: (0,0), (0,1), ..., (1,1), ...
    pub entries: Vec<TrigPoly<D>>,
}

impl<const D: usize> TrigMetric<D> {
    pub fn euclidean() -> Self {
        let n = D * (D + 1) / 2;
        TrigMetric {
            entries: vec![TrigPoly::zero(); n],
        }
    }

    fn slot(i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * D - a * (a + 1) / 2 + b
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut TrigPoly<D> {
        &mut self.entries[Self::slot(i, j)]
    }
}

impl<const D: usize> MetricMap<D> for TrigMetric<D> {
    fn eval<T: Real>(&self, x: [T; D]) -> [[T; D]; D] {
        let mut g = [[T::cst(0.0); D]; D];
        for i in 0..D {
            for j in i..D {
                let v = self.entries[Self::slot(i, j)].eval(x);
                g[i][j] = v;
                g[j][i] = v;
            }
            g[i][i] = g[i][i] + T::cst(1.0);
        }
        g
    }
}

/// Flat chart, `g = delta`.
#[derive(Clone, Copy, Debug)]
pub struct FlatChart;

impl<const D: usize> MetricMap<D> for FlatChart {
    fn eval<T: Real>(&self, _x: [T; D]) -> [[T; D]; D] {
        let mut g = [[T::cst(0.0); D]; D];
        for i in 0..D {
            g[i][i] = T::cst(1.0);
        }
        g
    }
}

/// Round sphere of radius^2 = rho2 in polar chart (theta, phi):
/// `g = rho2 (dtheta^2 + sin^2 theta dphi^2)`.
#[derive(Clone, Copy, Debug)]
pub struct SphereChart {
    pub rho2: f64,
}

impl MetricMap<2> for SphereChart {
    fn eval<T: Real>(&self, x: [T; 2]) -> [[T; 2]; 2] {
        let s = x[0].sin();
        let r2 = T::cst(self.rho2);
        [[r2, T::cst(0.0)], [T::cst(0.0), r2 * s * s]]
    }
}

/// Cigar metric `g = (dx^2 + dy^2) / (1 + x^2 + y^2)`.
#[derive(Clone, Copy, Debug)]
pub struct CigarChart;

impl MetricMap<2> for CigarChart {
    fn eval<T: Real>(&self, x: [T; 2]) -> [[T; 2]; 2] {
        let w = T::cst(1.0) / (T::cst(1.0) + x[0] * x[0] + x[1] * x[1]);
        [[w, T::cst(0.0)], [T::cst(0.0), w]]
    }
}

/// Cigar soliton potential `f = -log(1 + x^2 + y^2)`.
#[derive(Clone, Copy, Debug)]
pub struct CigarPotential;

impl ScalarMap<2> for CigarPotential {
    fn eval<T: Real>(&self, x: [T; 2]) -> T {
        -(T::cst(1.0) + x[0] * x[0] + x[1] * x[1]).ln()
    }
}

/// Cigar scalar curvature `R = 4 / (1 + x^2 + y^2)` as a closed form.
#[derive(Clone, Copy, Debug)]
pub struct CigarScalarCurvature;

impl ScalarMap<2> for CigarScalarCurvature {
    fn eval<T: Real>(&self, x: [T; 2]) -> T {
        T::cst(4.0) / (T::cst(1.0) + x[0] * x[0] + x[1] * x[1])
    }
}

/// Conformal metric `g = e^{2 phi} delta` with analytic `phi`.
#[derive(Clone, Debug)]
pub struct ConformalTrig {
    pub phi: TrigPoly<2>,
}

impl MetricMap<2> for ConformalTrig {
    fn eval<T: Real>(&self, x: [T; 2]) -> [[T; 2]; 2] {
        let w = (T::cst(2.0) * self.phi.eval(x)).exp();
        [[w, T::cst(0.0)], [T::cst(0.0), w]]
    }
}

/// Smallest eigenvalue of a symmetric matrix, D = 2 or 3.
pub fn sym_min_eigenvalue<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    match D {
        2 => {
            let tr = m[0][0] + m[1][1];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            tr / 2.0 - disc
        }
        3 => {
            // Smith's trigonometric method for symmetric 3x3.
            let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
            let mut b = [[0.0_f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    b[i][j] = m[i][j] - if i == j { q } else { 0.0 };
                }
            }
            let p2 = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| b[i][j] * b[i][j])
                .sum::<f64>()
                / 6.0;
            let p = p2.sqrt();
            if p < 1e-300 {
                return q;
            }
            let detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            let r = (detb / (2.0 * p * p * p)).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            // smallest eigenvalue uses phi + 2*pi/3
            q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
        }
        _ => panic!("sym_min_eigenvalue supports D = 2, 3"),
    }
}

/// Eigenvalue floor below which a metric is treated as singular.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;

/// Check positive definiteness at a point.
pub fn check_positive_definite<const D: usize, M: MetricMap<D>>(
    g: &M,
    x: [f64; D],
) -> Result<(), GeometryError> {
    let gm = g.eval(x);
    let min_eig = sym_min_eigenvalue(&gm);
    if min_eig <= EIGENVALUE_FLOOR {
        return Err(GeometryError::SingularMetric { min_eig });
    }
    Ok(())
}

fn random_trig_poly<const D: usize>(rng: &mut ChaCha8Rng, amp: f64, terms: usize) -> TrigPoly<D> {
    let mut p = TrigPoly::zero();
    for _ in 0..terms {
        let mut wave = [0.0_f64; D];
        let mut all_zero = true;
        for w in wave.iter_mut() {
            // up to 3 modes per axis
            *w = rng.gen_range(0..=3) as f64;
            if *w != 0.0 {
                all_zero = false;
            }
        }
        if all_zero {
            wave[rng.gen_range(0..D)] = 1.0;
        }
        p.push(amp * rng.gen_range(-1.0..1.0), wave, rng.gen_range(0.0..std::f64::consts::TAU));
    }
    p
}

/// Random scalar field for identity probes.
pub fn random_scalar<const D: usize>(seed: u64, amp: f64) -> TrigPoly<D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_trig_poly(&mut rng, amp, 3)
}

/// Random perturbed metric `delta + eps * (symmetric trig polynomial)`,
/// rejection-sampled for positive definiteness on a probe set.
pub fn random_metric<const D: usize>(seed: u64, eps: f64) -> TrigMetric<D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'outer: loop {
        let mut m = TrigMetric::<D>::euclidean();
        for i in 0..D {
            for j in i..D {
                *m.entry_mut(i, j) = random_trig_poly(&mut rng, eps, 3);
            }
        }
        // probe a coarse lattice for definiteness
        let steps = 5usize;
        for idx in 0..steps.pow(D as u32) {
            let mut x = [0.0_f64; D];
            let mut rem = idx;
            for a in 0..D {
                x[a] = (rem % steps) as f64 / steps as f64 * std::f64::consts::TAU;
                rem /= steps;
            }
            if check_positive_definite(&m, x).is_err() {
                continue 'outer;
            }
        }
        return m;
    }
}

/// Random probe point on the D-torus.
pub fn random_point<const D: usize>(rng: &mut ChaCha8Rng) -> [f64; D] {
    let mut x = [0.0_f64; D];
    for a in x.iter_mut() {
        *a = rng.gen_range(0.0..std::f64::consts::TAU);
    }
    x
}
