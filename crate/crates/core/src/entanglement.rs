//! Entanglement certification through the Peres-Horodecki criterion:
//! partial transpose over Bob's slots, minimum eigenvalue, negativity,
//! and the separability threshold of the Werner frame family.

use crate::error::Result;
use crate::matcore::{
    hermitian_eigen, partial_transpose, ComplexMatrix, QubitFactorization, STRUCTURAL_TOL,
};
use crate::ssr::{self, twirl, ChargeAssignment};
use crate::states::{system_with_frame, werner, PartyLayout};

/// Eigenvalue threshold below which a partial-transpose eigenvalue counts
/// as negative. Absorbs eigensolver noise; states with a true negative
/// eigenvalue above this threshold (|min| < 1e-10) report as separable.
pub const ENTANGLED_EIG_THRESHOLD: f64 = -1e-10;

/// Identifies the irreducible sub-block of the partially transposed state
/// that produced the minimum eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOrigin {
    /// Local charge pair (q_alice, q_bob) of the sector holding the block.
    pub charges: (u32, u32),
    /// Basis indices spanned by the block.
    pub indices: Vec<usize>,
}

/// Outcome of the partial-transpose test.
#[derive(Debug, Clone)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub negativity: f64,
    pub entangled: bool,
    pub block_origin: Option<BlockOrigin>,
}

fn report_from_pt(pt: &ComplexMatrix) -> Result<PptReport> {
    let (evals, _) = hermitian_eigen(pt)?;
    let min_eigenvalue = evals[0];
    let trace_norm: f64 = evals.iter().map(|v| v.abs()).sum();
    let negativity = ((trace_norm - 1.0) / 2.0).max(0.0);
    Ok(PptReport {
        min_eigenvalue,
        negativity,
        entangled: min_eigenvalue < ENTANGLED_EIG_THRESHOLD,
        block_origin: None,
    })
}

/// Partial-transpose test over Bob's slots.
///
/// The input must be a valid density matrix. The report leaves
/// `block_origin` empty; use [`ppt_report_sectored`] on twirled states to
/// locate the sector block responsible for the negative eigenvalue.
pub fn ppt_report(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    layout: &PartyLayout,
) -> Result<PptReport> {
    rho.check_density_matrix()?;
    let pt = partial_transpose(rho, fact, layout.bob())?;
    report_from_pt(&pt)
}

/// Partial-transpose test that also attributes the minimum eigenvalue to
/// an irreducible block of a local-charge sector.
///
/// The input must be twirled with respect to the given charges; the
/// partial transpose of a twirled state is again sector-block-diagonal,
/// and within each sector the block splits into connected components of
/// its nonzero pattern. The component attaining the minimum eigenvalue is
/// reported.
pub fn ppt_report_sectored(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    layout: &PartyLayout,
    charges: &ChargeAssignment,
) -> Result<PptReport> {
    rho.check_density_matrix()?;
    let pt = partial_transpose(rho, fact, layout.bob())?;
    let mut report = report_from_pt(&pt)?;

    let decomposition = ssr::sectors(&pt, fact, layout, charges)?;
    let mut best: Option<(f64, BlockOrigin)> = None;
    for sector in &decomposition.sectors {
        for component in connected_components(&sector.block) {
            let sub = extract(&sector.block, &component);
            let (evals, _) = hermitian_eigen(&sub)?;
            let min = evals[0];
            let origin = BlockOrigin {
                charges: sector.charges,
                indices: component.iter().map(|&c| sector.indices[c]).collect(),
            };
            if best.as_ref().is_none_or(|(b, _)| min < *b) {
                best = Some((min, origin));
            }
        }
    }
    report.block_origin = best.map(|(_, origin)| origin);
    Ok(report)
}

/// Connected components of the nonzero pattern of a Hermitian block.
fn connected_components(block: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = block.dim();
    let mut assigned = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut component = Vec::new();
        assigned[start] = true;
        while let Some(i) = stack.pop() {
            component.push(i);
            for j in 0..n {
                if !assigned[j] && block.get(i, j).norm() > STRUCTURAL_TOL {
                    assigned[j] = true;
                    stack.push(j);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

fn extract(block: &ComplexMatrix, indices: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(indices.len()).expect("component within block dims");
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            out.set(r, c, block.get(i, j));
        }
    }
    out
}

/// Locate the frame parameter where the Werner state's minimum
/// partial-transpose eigenvalue changes sign, by bisection to the given
/// tolerance.
pub fn werner_ppt_threshold(tol: f64) -> f64 {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let fact = QubitFactorization::new(2).expect("two slots fit");
    let layout = PartyLayout::new(vec![0], vec![1], 2).expect("valid layout");
    let min_eig = |p: f64| -> f64 {
        let w = werner(p).expect("p inside [0,1] during bisection");
        let pt = partial_transpose(&w, &fact, layout.bob()).expect("valid slots");
        hermitian_eigen(&pt).expect("PT of Hermitian is Hermitian").0[0]
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(min_eig(lo) > 0.0 && min_eig(hi) < 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_eig(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Joint answer of the activation experiment at frame parameter `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualityCertificate {
    /// The frame itself passes the PPT test (no entanglement of its own).
    pub frame_separable: bool,
    /// The twirled total state is entangled across the Alice/Bob cut.
    pub dual_entangled: bool,
}

/// Evaluate both sides of the activation claim: whether the frame is
/// separable and whether the twirled total state carries entanglement.
pub fn duality_certificate(p: f64) -> Result<DualityCertificate> {
    let fact2 = QubitFactorization::new(2)?;
    let layout2 = PartyLayout::new(vec![0], vec![1], 2)?;
    let frame = ppt_report(&werner(p)?, &fact2, &layout2)?;

    let swf = system_with_frame(p)?;
    let charges = ChargeAssignment::per_particle_slot(4);
    let eff = twirl(&swf.rho, &swf.fact, &swf.layout, &charges);
    let dual = ppt_report(&eff, &swf.fact, &swf.layout)?;

    Ok(DualityCertificate {
        frame_separable: !frame.entangled,
        dual_entangled: dual.entangled,
    })
}
