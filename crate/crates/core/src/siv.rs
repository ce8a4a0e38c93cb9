//! Superselection-induced variance (SIV): the local particle-number
//! variance of a pure state, its convex-roof extension to mixed states
//! over charge-definite decompositions, and the closed form for the
//! Werner frame family.
//!
//! Two normalization conventions coexist and differ by a factor of four;
//! every result carries an explicit [`SivConvention`] tag. The pure-state
//! formula and the minimizer use `FactorFour`; the Werner closed form is
//! stated in the `Unnormalized` convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::werner_ppt_threshold;
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigen, ComplexMatrix, Ket, QubitFactorization, C64};
use crate::ssr::ChargeAssignment;

/// Normalization convention of a SIV value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SivConvention {
    /// Variance scaled by an explicit factor of four.
    FactorFour,
    /// Bare variance, one quarter of the `FactorFour` value.
    Unnormalized,
}

/// How a SIV value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SivMethod {
    PureDirect,
    ClosedForm,
    Minimizer,
}

/// Convex-roof search record for one global-charge block.
#[derive(Debug, Clone)]
pub struct BlockMinimization {
    pub global_charge: u32,
    pub weight: f64,
    pub block_dim: usize,
    pub value: f64,
    pub best_restart: usize,
    /// Best objective after each refinement pass of the winning restart;
    /// non-increasing by construction.
    pub objective_trace: Vec<f64>,
}

/// Diagnostics of a minimizer run.
#[derive(Debug, Clone)]
pub struct MinimizerDiagnostics {
    pub restarts: usize,
    pub seed: u64,
    pub blocks: Vec<BlockMinimization>,
}

/// A SIV value with its provenance.
#[derive(Debug, Clone)]
pub struct SivReport {
    pub value: f64,
    pub convention: SivConvention,
    pub method: SivMethod,
    pub diagnostics: Option<MinimizerDiagnostics>,
}

impl SivReport {
    /// The value converted into the requested convention.
    pub fn value_as(&self, convention: SivConvention) -> f64 {
        match (self.convention, convention) {
            (SivConvention::FactorFour, SivConvention::Unnormalized) => self.value / 4.0,
            (SivConvention::Unnormalized, SivConvention::FactorFour) => self.value * 4.0,
            _ => self.value,
        }
    }
}

/// Options of the convex-roof minimizer.
#[derive(Debug, Clone)]
pub struct SivOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub tol: f64,
    /// Number of pure states in a candidate decomposition per block;
    /// defaults to twice the block dimension.
    pub ensemble_size: Option<usize>,
}

impl Default for SivOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iterations: 2000, seed: 42, tol: 1e-8, ensemble_size: None }
    }
}

/// Local particle-number variance of a pure state,
/// `4 (<psi|N^2|psi> - <psi|N|psi>^2)` in the `FactorFour` convention.
pub fn siv_pure(psi: &Ket, n_a: &ComplexMatrix) -> f64 {
    assert_eq!(psi.dim(), n_a.dim(), "operator does not match state dimension");
    let d = psi.dim();
    let mut applied = vec![C64::new(0.0, 0.0); d];
    for r in 0..d {
        let mut sum = C64::new(0.0, 0.0);
        for c in 0..d {
            sum += n_a.get(r, c) * psi.amplitude(c);
        }
        applied[r] = sum;
    }
    let e1: f64 = (0..d).map(|i| (psi.amplitude(i).conj() * applied[i]).re).sum();
    let e2: f64 = applied.iter().map(|v| v.norm_sqr()).sum();
    (4.0 * (e2 - e1 * e1)).max(0.0)
}

/// Closed-form SIV of formation of the Werner frame, `p^2 / (2 (1 + p))`
/// in the `Unnormalized` convention.
pub fn werner_siv_closed_form(p: f64) -> Result<SivReport> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(SivReport {
        value: p * p / (2.0 * (1.0 + p)),
        convention: SivConvention::Unnormalized,
        method: SivMethod::ClosedForm,
        diagnostics: None,
    })
}

/// Closed-form SIV evaluated at the frame separability threshold.
pub fn separability_siv_bound() -> f64 {
    let threshold = werner_ppt_threshold(1e-9);
    werner_siv_closed_form(threshold)
        .expect("threshold lies inside [0, 1]")
        .value
}

/// Convex-roof SIV of formation over decompositions into charge-definite
/// pure states, estimated by seeded random restarts with coordinate
/// descent over the isometry freedom of each global-charge block.
///
/// Fails when the state carries coherence between different global
/// charges, because then no charge-definite decomposition exists. The
/// result is deterministic for a fixed seed and reported in the
/// `FactorFour` convention.
pub fn siv_formation(
    rho: &ComplexMatrix,
    n_a: &ComplexMatrix,
    charges: &ChargeAssignment,
    opts: &SivOptions,
) -> Result<SivReport> {
    assert_eq!(rho.dim(), n_a.dim(), "operator does not match state dimension");
    assert!(opts.tol > 0.0 && opts.restarts > 0 && opts.max_iterations > 0);
    let fact = QubitFactorization::for_dim(rho.dim())?;
    assert_eq!(charges.num_slots(), fact.num_qubits(), "charge table does not match slots");

    let d = rho.dim();
    let global: Vec<u32> = (0..d).map(|i| charges.global_charge(&fact, i)).collect();

    let mut cross: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if global[i] != global[j] {
                cross = cross.max(rho.get(i, j).norm());
            }
        }
    }
    if cross > 1e-10 {
        return Err(Error::NoSsrDecomposition(cross));
    }

    let mut groups: Vec<(u32, Vec<usize>)> = Vec::new();
    for i in 0..d {
        match groups.iter_mut().find(|(g, _)| *g == global[i]) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((global[i], vec![i])),
        }
    }
    groups.sort_by_key(|(g, _)| *g);

    let n_diag: Vec<f64> = (0..d).map(|i| n_a.get(i, i).re).collect();

    let mut total = 0.0;
    let mut blocks = Vec::new();
    for (charge, indices) in groups {
        let weight: f64 = indices.iter().map(|&i| rho.get(i, i).re).sum();
        if weight < 1e-14 {
            continue;
        }
        if indices.len() == 1 {
            // a single basis state has a definite particle number
            blocks.push(BlockMinimization {
                global_charge: charge,
                weight,
                block_dim: 1,
                value: 0.0,
                best_restart: 0,
                objective_trace: vec![0.0],
            });
            continue;
        }

        let mut block = ComplexMatrix::zeros(indices.len())?;
        for (bi, &i) in indices.iter().enumerate() {
            for (bj, &j) in indices.iter().enumerate() {
                block.set(bi, bj, rho.get(i, j));
            }
        }
        let (evals, evecs) = hermitian_eigen(&block)?;
        let kept: Vec<usize> = (0..evals.len()).filter(|&k| evals[k] > 1e-14).collect();
        if kept.is_empty() {
            continue;
        }
        let rank = kept.len();
        let block_dim = indices.len();
        // sqrt-weighted eigen-ensemble: sq[j][k] = sqrt(lambda_k) e_k[j]
        let mut sq = vec![C64::new(0.0, 0.0); block_dim * rank];
        for (k, &col) in kept.iter().enumerate() {
            let root = evals[col].sqrt();
            for j in 0..block_dim {
                sq[j * rank + k] = evecs.get(j, col) * root;
            }
        }
        let n_block: Vec<f64> = indices.iter().map(|&i| n_diag[i]).collect();
        let m = opts.ensemble_size.unwrap_or(2 * block_dim).max(rank);

        let mut problem = BlockProblem { m, rank, block_dim, sq, n_block, cols: vec![C64::new(0.0, 0.0); m * rank] };
        let (value, best_restart, trace) = minimize_block(&mut problem, charge, opts);
        total += value;
        blocks.push(BlockMinimization {
            global_charge: charge,
            weight,
            block_dim,
            value,
            best_restart,
            objective_trace: trace,
        });
    }

    Ok(SivReport {
        value: total,
        convention: SivConvention::FactorFour,
        method: SivMethod::Minimizer,
        diagnostics: Some(MinimizerDiagnostics { restarts: opts.restarts, seed: opts.seed, blocks }),
    })
}

struct BlockProblem {
    m: usize,
    rank: usize,
    block_dim: usize,
    /// block_dim x rank, row-major.
    sq: Vec<C64>,
    n_block: Vec<f64>,
    /// scratch isometry, m x rank column-major.
    cols: Vec<C64>,
}

impl BlockProblem {
    /// Ensemble average of the pure-state variance for the decomposition
    /// parametrized by `x` (real and imaginary parts of an m x rank
    /// matrix whose columns get orthonormalized).
    fn objective(&mut self, x: &[f64]) -> f64 {
        let (m, rank) = (self.m, self.rank);
        for k in 0..rank {
            for i in 0..m {
                let base = 2 * (k * m + i);
                self.cols[k * m + i] = C64::new(x[base], x[base + 1]);
            }
        }
        self.orthonormalize();

        let mut objective = 0.0;
        for i in 0..m {
            let mut w = 0.0;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for j in 0..self.block_dim {
                let mut phi = C64::new(0.0, 0.0);
                for k in 0..rank {
                    phi += self.cols[k * m + i] * self.sq[j * rank + k];
                }
                let p = phi.norm_sqr();
                let n = self.n_block[j];
                w += p;
                s1 += p * n;
                s2 += p * n * n;
            }
            if w > 1e-16 {
                objective += 4.0 * (s2 - s1 * s1 / w);
            }
        }
        objective.max(0.0)
    }

    /// Modified Gram-Schmidt with re-orthogonalization; degenerate
    /// columns fall back to canonical basis vectors.
    fn orthonormalize(&mut self) {
        let m = self.m;
        for k in 0..self.rank {
            for _pass in 0..2 {
                for l in 0..k {
                    let mut proj = C64::new(0.0, 0.0);
                    for i in 0..m {
                        proj += self.cols[l * m + i].conj() * self.cols[k * m + i];
                    }
                    for i in 0..m {
                        let update = proj * self.cols[l * m + i];
                        self.cols[k * m + i] -= update;
                    }
                }
            }
            let norm =
                (0..m).map(|i| self.cols[k * m + i].norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for i in 0..m {
                    self.cols[k * m + i] /= norm;
                }
                continue;
            }
            // fall back to the canonical vector with the largest residual
            let mut done = false;
            for basis in 0..m {
                for i in 0..m {
                    self.cols[k * m + i] = C64::new(0.0, 0.0);
                }
                self.cols[k * m + basis] = C64::new(1.0, 0.0);
                for l in 0..k {
                    let proj = self.cols[l * m + basis].conj();
                    for i in 0..m {
                        let update = proj * self.cols[l * m + i];
                        self.cols[k * m + i] -= update;
                    }
                }
                let res =
                    (0..m).map(|i| self.cols[k * m + i].norm_sqr()).sum::<f64>().sqrt();
                if res > 1e-3 {
                    for i in 0..m {
                        self.cols[k * m + i] /= res;
                    }
                    done = true;
                    break;
                }
            }
            debug_assert!(done, "no canonical fallback found");
        }
    }
}

fn restart_seed(seed: u64, charge: u32, restart: usize) -> u64 {
    let mut z = seed
        ^ (charge as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (restart as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded random restarts with coordinate-wise perturbation descent and a
/// shrinking step. Restarts are combined by exact comparison, ties going
/// to the lower restart index.
fn minimize_block(
    problem: &mut BlockProblem,
    charge: u32,
    opts: &SivOptions,
) -> (f64, usize, Vec<f64>) {
    let num_params = 2 * problem.m * problem.rank;
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for restart in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, charge, restart));
        let mut x: Vec<f64> = (0..num_params).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut value = problem.objective(&x);
        let mut trace = vec![value];
        let mut step = 0.5;
        let mut iterations = 0;
        while iterations < opts.max_iterations && step > opts.tol {
            let mut improved = false;
            for c in 0..num_params {
                for dir in [1.0, -1.0] {
                    let old = x[c];
                    x[c] = old + dir * step;
                    let candidate = problem.objective(&x);
                    if candidate < value - 1e-15 {
                        value = candidate;
                        improved = true;
                        break;
                    }
                    x[c] = old;
                }
            }
            if !improved {
                step *= 0.5;
            }
            trace.push(value);
            iterations += 1;
        }
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, restart, trace));
        }
    }
    best.expect("at least one restart runs")
}
