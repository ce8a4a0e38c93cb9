//! Constructors for the named states of the model in a fixed qubit
//! encoding.
//!
//! Every particle slot is a two-level system in the encoding
//! `|0> = |k, a>` and `|1> = |kbar, b>`: logical 0 is a particle of
//! type `a` with momentum `k`, logical 1 a particle of type `b` with
//! momentum `kbar`. Polarization subindices are dropped; the first slot
//! of a pair is H-polarized, the second V-polarized.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{
    permute_slots, permute_slots_ket, tensor, tensor_ket, ComplexMatrix, Ket, QubitFactorization,
};

type C64 = Complex64;

/// The two-level encoding of one particle slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodedBasis {
    /// Logical 0, standing for |k, a>.
    Zero,
    /// Logical 1, standing for |kbar, b>.
    One,
}

impl EncodedBasis {
    pub fn from_logical(bit: usize) -> Self {
        if bit == 0 {
            EncodedBasis::Zero
        } else {
            EncodedBasis::One
        }
    }

    pub fn logical(self) -> usize {
        match self {
            EncodedBasis::Zero => 0,
            EncodedBasis::One => 1,
        }
    }

    /// Number of type-`a` particles carried by this basis value. The
    /// type-`b` count is the complement, one particle per slot.
    pub fn particle_a_count(self) -> u32 {
        match self {
            EncodedBasis::Zero => 1,
            EncodedBasis::One => 0,
        }
    }
}

/// One of the two parties of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Assignment of qubit slots to the two parties. The slot lists are
/// disjoint and together cover every slot of the factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyLayout {
    alice: Vec<usize>,
    bob: Vec<usize>,
}

impl PartyLayout {
    pub fn new(alice: Vec<usize>, bob: Vec<usize>, num_slots: usize) -> Result<Self> {
        let mut seen = vec![false; num_slots];
        for &s in alice.iter().chain(bob.iter()) {
            if s >= num_slots {
                return Err(Error::SlotOutOfRange { slot: s, num_qubits: num_slots });
            }
            if seen[s] {
                return Err(Error::InvalidLayout(format!("slot {s} assigned twice")));
            }
            seen[s] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidLayout("layout does not cover all slots".into()));
        }
        Ok(Self { alice, bob })
    }

    pub fn slots(&self, party: Party) -> &[usize] {
        match party {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
        }
    }

    pub fn alice(&self) -> &[usize] {
        &self.alice
    }

    pub fn bob(&self) -> &[usize] {
        &self.bob
    }

    pub fn num_slots(&self) -> usize {
        self.alice.len() + self.bob.len()
    }
}

/// The maximally entangled pair (|01> + |10>)/sqrt(2) on two slots.
pub fn bell_psi() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    Ket::new(vec![z, C64::new(h, 0.0), C64::new(h, 0.0), z]).expect("exact amplitudes")
}

/// Werner frame (1-p)/4 * I + p |Psi><Psi| on two reference slots.
pub fn werner(p: f64) -> Result<ComplexMatrix> {
    check_probability(p)?;
    let id = ComplexMatrix::identity(4)?.scaled((1.0 - p) / 4.0);
    Ok(id.add(&bell_psi().density().scaled(p)))
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// System plus reference frame in the party slot order
/// (A_sys, A_ref, B_sys, B_ref).
#[derive(Debug, Clone)]
pub struct SystemWithFrame {
    pub rho: ComplexMatrix,
    pub fact: QubitFactorization,
    pub layout: PartyLayout,
}

/// Total state |Psi><Psi| (x) werner(p), reordered so that each party's
/// system and reference slots are contiguous: Alice = {0, 1},
/// Bob = {2, 3}.
pub fn system_with_frame(p: f64) -> Result<SystemWithFrame> {
    check_probability(p)?;
    let rho_nat = tensor(&bell_psi().density(), &werner(p)?)?; // (A_sys, B_sys, A_ref, B_ref)
    let fact = QubitFactorization::new(4)?;
    let rho = permute_slots(&rho_nat, &fact, &BUILD_TO_PARTY_ORDER)?;
    let layout = PartyLayout::new(vec![0, 1], vec![2, 3], 4)?;
    Ok(SystemWithFrame { rho, fact, layout })
}

/// Permutation taking the natural build order (A_sys, B_sys, A_ref, B_ref)
/// to the party order (A_sys, A_ref, B_sys, B_ref); `perm[new] = old`.
pub const BUILD_TO_PARTY_ORDER: [usize; 4] = [0, 2, 1, 3];

/// Two copies of the pair as a pure state in party slot order:
/// (|00>|11> + |11>|00> + |01>|10> + |10>|01>)/2 with Alice holding the
/// first pair of slots.
pub fn two_copies() -> Ket {
    let fact = QubitFactorization::new(4).expect("4 slots fit");
    let nat = tensor_ket(&bell_psi(), &bell_psi()).expect("4 slots fit");
    permute_slots_ket(&nat, &fact, &BUILD_TO_PARTY_ORDER).expect("valid permutation")
}

/// Hyper-entangled form (|HV> + |VH>) (x) (|k kbar> + |kbar k>)/2 on the
/// slots (pol1, pol2, mom1, mom2), encoding H, k as 0 and V, kbar as 1.
pub fn hyper_state() -> Ket {
    tensor_ket(&bell_psi(), &bell_psi()).expect("4 slots fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{hermitian_eigen, partial_trace};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_amplitudes() {
        let b = bell_psi();
        assert!((b.amplitude(1).re - H).abs() < 1e-15);
        assert!((b.amplitude(2).re - H).abs() < 1e-15);
        assert!(b.amplitude(0).norm() < 1e-15 && b.amplitude(3).norm() < 1e-15);
        assert!((b.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_reductions_are_maximally_mixed() {
        let fact = QubitFactorization::new(2).unwrap();
        let rho = bell_psi().density();
        for slot in 0..2 {
            let red = partial_trace(&rho, &fact, &[slot]).unwrap();
            let expected = ComplexMatrix::identity(2).unwrap().scaled(0.5);
            assert!(red.max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn werner_limits() {
        let w0 = werner(0.0).unwrap();
        assert!(w0.max_abs_diff(&ComplexMatrix::identity(4).unwrap().scaled(0.25)) < 1e-15);
        let w1 = werner(1.0).unwrap();
        assert!(w1.max_abs_diff(&bell_psi().density()) < 1e-15);
    }

    #[test]
    fn werner_at_one_half() {
        let w = werner(0.5).unwrap();
        let diag = [0.125, 0.375, 0.375, 0.125];
        for (i, d) in diag.iter().enumerate() {
            assert!((w.get(i, i).re - d).abs() < 1e-15);
        }
        assert!((w.get(1, 2).re - 0.25).abs() < 1e-15);
        assert!((w.get(2, 1).re - 0.25).abs() < 1e-15);
        assert!(w.get(0, 3).norm() < 1e-15);
    }

    #[test]
    fn werner_rejects_bad_p() {
        assert!(werner(-0.1).is_err());
        assert!(werner(1.5).is_err());
        assert!(werner(f64::NAN).is_err());
    }

    #[test]
    fn werner_is_valid_density_matrix_on_grid() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            werner(p).unwrap().check_density_matrix().unwrap();
        }
    }

    #[test]
    fn system_with_frame_at_one_is_two_copies() {
        let swf = system_with_frame(1.0).unwrap();
        let expected = two_copies().density();
        assert!(swf.rho.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn system_with_frame_at_zero() {
        let swf = system_with_frame(0.0).unwrap();
        let fact = QubitFactorization::new(4).unwrap();
        let nat = tensor(
            &bell_psi().density(),
            &ComplexMatrix::identity(4).unwrap().scaled(0.25),
        )
        .unwrap();
        let expected = permute_slots(&nat, &fact, &BUILD_TO_PARTY_ORDER).unwrap();
        assert!(swf.rho.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn system_with_frame_has_unit_trace() {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let swf = system_with_frame(p).unwrap();
            assert!((swf.rho.trace().re - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_reduction_recovers_frame() {
        for &p in &[0.0, 0.3, 0.8, 1.0] {
            let swf = system_with_frame(p).unwrap();
            // trace out the system slots, keeping (A_ref, B_ref)
            let red = partial_trace(&swf.rho, &swf.fact, &[0, 2]).unwrap();
            assert!(red.max_abs_diff(&werner(p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn system_reduction_recovers_pair() {
        let swf = system_with_frame(0.4).unwrap();
        let red = partial_trace(&swf.rho, &swf.fact, &[1, 3]).unwrap();
        assert!(red.max_abs_diff(&bell_psi().density()) < 1e-12);
    }

    #[test]
    fn two_copies_amplitudes() {
        let t = two_copies();
        let expected = [3usize, 6, 9, 12];
        for i in 0..16 {
            if expected.contains(&i) {
                assert!((t.amplitude(i).re - 0.5).abs() < 1e-15, "index {i}");
            } else {
                assert!(t.amplitude(i).norm() < 1e-15, "index {i}");
            }
        }
        assert!((t.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_copies_party_exchange_symmetry() {
        let fact = QubitFactorization::new(4).unwrap();
        let t = two_copies();
        let swapped = permute_slots_ket(&t, &fact, &[2, 3, 0, 1]).unwrap();
        assert!(swapped.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn hyper_state_amplitudes() {
        let h = hyper_state();
        let expected = [5usize, 6, 9, 10];
        for i in 0..16 {
            if expected.contains(&i) {
                assert!((h.amplitude(i).re - 0.5).abs() < 1e-15, "index {i}");
            } else {
                assert!(h.amplitude(i).norm() < 1e-15, "index {i}");
            }
        }
        assert!((h.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyper_state_polarization_factor_is_bell() {
        let fact = QubitFactorization::new(4).unwrap();
        let rho = hyper_state().density();
        let pol = partial_trace(&rho, &fact, &[2, 3]).unwrap();
        assert!(pol.max_abs_diff(&bell_psi().density()) < 1e-14);
        // purity of the reduced state confirms the product structure
        let (evals, _) = hermitian_eigen(&pol).unwrap();
        assert!((evals[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn layout_validation() {
        assert!(PartyLayout::new(vec![0, 1], vec![2, 3], 4).is_ok());
        assert!(PartyLayout::new(vec![0, 1], vec![1, 2], 4).is_err());
        assert!(PartyLayout::new(vec![0], vec![2], 4).is_err());
        assert!(PartyLayout::new(vec![0, 4], vec![1, 2], 4).is_err());
    }

    #[test]
    fn encoding_charges() {
        assert_eq!(EncodedBasis::from_logical(0).particle_a_count(), 1);
        assert_eq!(EncodedBasis::from_logical(1).particle_a_count(), 0);
        assert_eq!(EncodedBasis::Zero.logical(), 0);
    }
}
