//! Superselection machinery: local charge operators, the twirl that
//! removes forbidden coherences, and charge-sector decompositions.
//!
//! The superselection rule forbids coherence between states with
//! different local particle-type-a counts. The twirl is implemented as
//! entrywise charge filtering, which coincides with group averaging over
//! local phase rotations for this abelian charge.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, Ket, QubitFactorization, STRUCTURAL_TOL};
use crate::states::{EncodedBasis, Party, PartyLayout};

/// Per-slot particle-type-a count carried by each logical value.
///
/// The standard assignment follows the particle encoding: logical 0
/// carries one particle of type a, logical 1 carries none (it carries
/// the type-b particle instead). Slots that represent a chargeless
/// degree of freedom, such as a bare polarization register, carry zero
/// for both values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeAssignment {
    per_slot: Vec<[u32; 2]>,
}

impl ChargeAssignment {
    /// Every slot is a particle slot with the standard encoding.
    pub fn per_particle_slot(num_slots: usize) -> Self {
        let charge = [
            EncodedBasis::Zero.particle_a_count(),
            EncodedBasis::One.particle_a_count(),
        ];
        Self { per_slot: vec![charge; num_slots] }
    }

    /// Every slot carries zero charge; the twirl becomes the identity.
    pub fn chargeless(num_slots: usize) -> Self {
        Self { per_slot: vec![[0, 0]; num_slots] }
    }

    /// Explicit per-slot charge table `[charge of 0, charge of 1]`.
    pub fn from_per_slot(per_slot: Vec<[u32; 2]>) -> Self {
        Self { per_slot }
    }

    pub fn num_slots(&self) -> usize {
        self.per_slot.len()
    }

    #[inline]
    pub fn slot_charge(&self, slot: usize, bit: usize) -> u32 {
        self.per_slot[slot][bit]
    }

    /// Charge of basis state `index` summed over the given slots.
    pub fn local_charge(&self, fact: &QubitFactorization, slots: &[usize], index: usize) -> u32 {
        slots.iter().map(|&s| self.slot_charge(s, fact.bit(index, s))).sum()
    }

    /// Charge of basis state `index` summed over all slots.
    pub fn global_charge(&self, fact: &QubitFactorization, index: usize) -> u32 {
        (0..self.num_slots()).map(|s| self.slot_charge(s, fact.bit(index, s))).sum()
    }
}

/// Diagonal operator counting the party's type-a particles: the entry for
/// basis state |x> is the charge summed over the party's slots.
pub fn local_charge_operator(
    fact: &QubitFactorization,
    layout: &PartyLayout,
    party: Party,
    charges: &ChargeAssignment,
) -> ComplexMatrix {
    assert_eq!(charges.num_slots(), fact.num_qubits(), "charge table does not match slots");
    let slots = layout.slots(party);
    let d = fact.dim();
    let mut m = ComplexMatrix::zeros(d).expect("factorization dim is valid");
    for i in 0..d {
        let q = charges.local_charge(fact, slots, i) as f64;
        m.set(i, i, Complex64::new(q, 0.0));
    }
    m
}

/// Project out every coherence between basis states whose local charges
/// differ for either party. Trace-preserving and idempotent.
pub fn twirl(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    layout: &PartyLayout,
    charges: &ChargeAssignment,
) -> ComplexMatrix {
    assert_eq!(rho.dim(), fact.dim(), "matrix does not match factorization");
    assert_eq!(charges.num_slots(), fact.num_qubits(), "charge table does not match slots");
    let d = rho.dim();
    let pair = |i: usize| {
        (
            charges.local_charge(fact, layout.alice(), i),
            charges.local_charge(fact, layout.bob(), i),
        )
    };
    let keys: Vec<(u32, u32)> = (0..d).map(pair).collect();
    let mut out = ComplexMatrix::zeros(d).expect("dim already validated");
    for i in 0..d {
        for j in 0..d {
            if keys[i] == keys[j] {
                out.set(i, j, rho.get(i, j));
            }
        }
    }
    out
}

/// One local-charge sector: the basis indices with a fixed
/// (q_alice, q_bob) pair and the matrix block they carry.
#[derive(Debug, Clone)]
pub struct Sector {
    pub charges: (u32, u32),
    pub indices: Vec<usize>,
    pub block: ComplexMatrix,
}

/// Decomposition of a twirled state into local-charge sectors. The index
/// sets partition the full basis.
#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    dim: usize,
    pub sectors: Vec<Sector>,
}

impl SectorDecomposition {
    /// Rebuild the full matrix from the blocks; cross-sector entries are
    /// zero by construction.
    pub fn reassemble(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim).expect("dim validated at construction");
        for sector in &self.sectors {
            for (bi, &i) in sector.indices.iter().enumerate() {
                for (bj, &j) in sector.indices.iter().enumerate() {
                    out.set(i, j, sector.block.get(bi, bj));
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Split a twirled state into its (q_alice, q_bob) sectors. Fails if any
/// cross-sector entry exceeds the structural tolerance.
pub fn sectors(
    rho: &ComplexMatrix,
    fact: &QubitFactorization,
    layout: &PartyLayout,
    charges: &ChargeAssignment,
) -> Result<SectorDecomposition> {
    assert_eq!(rho.dim(), fact.dim(), "matrix does not match factorization");
    let d = rho.dim();
    let mut groups: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for i in 0..d {
        let key = (
            charges.local_charge(fact, layout.alice(), i),
            charges.local_charge(fact, layout.bob(), i),
        );
        groups.entry(key).or_default().push(i);
    }

    let mut key_of = vec![(0u32, 0u32); d];
    for (&key, idx) in &groups {
        for &i in idx {
            key_of[i] = key;
        }
    }
    let mut cross_mass: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            if key_of[i] != key_of[j] {
                cross_mass = cross_mass.max(rho.get(i, j).norm());
            }
        }
    }
    if cross_mass > STRUCTURAL_TOL {
        return Err(Error::NotTwirled(cross_mass));
    }

    let mut out = Vec::with_capacity(groups.len());
    for (key, indices) in groups {
        let mut block = ComplexMatrix::zeros(indices.len())?;
        for (bi, &i) in indices.iter().enumerate() {
            for (bj, &j) in indices.iter().enumerate() {
                block.set(bi, bj, rho.get(i, j));
            }
        }
        out.push(Sector { charges: key, indices, block });
    }
    Ok(SectorDecomposition { dim: d, sectors: out })
}

/// A pure state obeys the superselection rule when all of its support
/// shares a single global type-a count.
pub fn is_ssr_pure(psi: &Ket, charges: &ChargeAssignment) -> bool {
    let fact = match QubitFactorization::for_dim(psi.dim()) {
        Ok(f) => f,
        Err(_) => return false,
    };
    assert_eq!(charges.num_slots(), fact.num_qubits(), "charge table does not match slots");
    let mut global = None;
    for i in 0..psi.dim() {
        if psi.amplitude(i).norm() <= STRUCTURAL_TOL {
            continue;
        }
        let q = charges.global_charge(&fact, i);
        match global {
            None => global = Some(q),
            Some(g) if g != q => return false,
            _ => {}
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{partial_transpose, tensor, C64};
    use crate::states::{bell_psi, system_with_frame, two_copies, werner, BUILD_TO_PARTY_ORDER};
    use crate::states::Party::{Alice, Bob};
    use rand::{Rng, SeedableRng};

    fn layout2() -> PartyLayout {
        PartyLayout::new(vec![0], vec![1], 2).unwrap()
    }

    fn layout4() -> PartyLayout {
        PartyLayout::new(vec![0, 1], vec![2, 3], 4).unwrap()
    }

    fn random_density(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(dim).unwrap();
        for r in 0..dim {
            for c in 0..dim {
                g.set(r, c, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        let rho = g.matmul(&g.adjoint());
        let tr = rho.trace().re;
        rho.scaled(1.0 / tr)
    }

    #[test]
    fn charge_operator_on_two_slots() {
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let n_a = local_charge_operator(&fact, &layout2(), Alice, &charges);
        let expected = ComplexMatrix::from_diagonal(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(n_a, expected);
    }

    #[test]
    fn charge_operator_on_four_slots() {
        let fact = QubitFactorization::new(4).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let n_a = local_charge_operator(&fact, &layout4(), Alice, &charges);
        for i in 0..16 {
            let expected = (2 - (i >> 3 & 1) - (i >> 2 & 1)) as f64;
            assert_eq!(n_a.get(i, i).re, expected);
            assert!(expected >= 0.0 && expected <= 2.0);
        }
    }

    #[test]
    fn party_charges_sum_to_global_count() {
        let fact = QubitFactorization::new(4).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let n_a = local_charge_operator(&fact, &layout4(), Alice, &charges);
        let n_b = local_charge_operator(&fact, &layout4(), Bob, &charges);
        let total = n_a.add(&n_b);
        for i in 0..16 {
            let global = charges.global_charge(&fact, i) as f64;
            assert_eq!(total.get(i, i).re, global);
        }
        assert!(total.is_diagonal(0.0));
    }

    #[test]
    fn twirl_of_two_copies_keeps_six_entries() {
        let fact = QubitFactorization::new(4).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let eff = twirl(&two_copies().density(), &fact, &layout4(), &charges);
        let expected: Vec<(usize, usize)> =
            vec![(3, 3), (6, 6), (6, 9), (9, 6), (9, 9), (12, 12)];
        let mut seen = 0;
        for i in 0..16 {
            for j in 0..16 {
                let v = eff.get(i, j);
                if expected.contains(&(i, j)) {
                    assert!((v.re - 0.25).abs() < 1e-15 && v.im.abs() < 1e-15);
                    seen += 1;
                } else {
                    assert!(v.norm() < 1e-15, "({i},{j}) should vanish");
                }
            }
        }
        assert_eq!(seen, 6);
    }

    #[test]
    fn twirl_fixes_diagonal_matrices() {
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let m = ComplexMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(twirl(&m, &fact, &layout2(), &charges), m);
    }

    #[test]
    fn twirl_dephases_single_pair() {
        // the pair coherence |01><10| links different local charges
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let eff = twirl(&bell_psi().density(), &fact, &layout2(), &charges);
        let expected = ComplexMatrix::from_diagonal(&[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert!(eff.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn twirl_is_idempotent_and_trace_preserving() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let fact = QubitFactorization::new(4).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        for _ in 0..25 {
            let rho = random_density(&mut rng, 16);
            let t1 = twirl(&rho, &fact, &layout4(), &charges);
            let t2 = twirl(&t1, &fact, &layout4(), &charges);
            assert!(t1.max_abs_diff(&t2) < 1e-15);
            assert!((t1.trace().re - rho.trace().re).abs() < 1e-13);
            assert!(t1.hermiticity_deviation() < 1e-14);
        }
    }

    #[test]
    fn twirl_commutes_with_party_transpose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let fact = QubitFactorization::new(4).unwrap();
        let layout = layout4();
        let charges = ChargeAssignment::per_particle_slot(4);
        for _ in 0..25 {
            let rho = random_density(&mut rng, 16);
            let a = partial_transpose(&twirl(&rho, &fact, &layout, &charges), &fact, layout.bob())
                .unwrap();
            let b = twirl(
                &partial_transpose(&rho, &fact, layout.bob()).unwrap(),
                &fact,
                &layout,
                &charges,
            );
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn twirl_fixes_states_with_sector_coherence_only() {
        // coherence inside a fixed (q_a, q_b) sector survives unchanged
        let fact = QubitFactorization::new(4).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let rho = two_copies().density();
        let eff = twirl(&rho, &fact, &layout4(), &charges);
        let again = twirl(&eff, &fact, &layout4(), &charges);
        assert_eq!(eff, again);
    }

    #[test]
    fn frame_identity_term_is_diagonal_after_twirl() {
        let p = 0.35;
        let fact = QubitFactorization::new(4).unwrap();
        let id_term = tensor(
            &bell_psi().density(),
            &ComplexMatrix::identity(4).unwrap(),
        )
        .unwrap()
        .scaled((1.0 - p) / 4.0);
        let id_term = crate::matcore::permute_slots(&id_term, &fact, &BUILD_TO_PARTY_ORDER).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let eff = twirl(&id_term, &fact, &layout4(), &charges);
        assert!(eff.is_diagonal(1e-15));
    }

    #[test]
    fn sectors_of_twirled_frame_state() {
        let p = 0.6;
        let swf = system_with_frame(p).unwrap();
        let charges = ChargeAssignment::per_particle_slot(4);
        let eff = twirl(&swf.rho, &swf.fact, &swf.layout, &charges);
        let dec = sectors(&eff, &swf.fact, &swf.layout, &charges).unwrap();
        assert!(dec.reassemble().max_abs_diff(&eff) < 1e-15);
        let total_dim: usize = dec.sectors.iter().map(|s| s.indices.len()).sum();
        assert_eq!(total_dim, 16);

        // the (1,1) sector holds the off-diagonal p/4 pair on
        // |01>_A|10>_B and |10>_A|01>_B
        let s11 = dec.sectors.iter().find(|s| s.charges == (1, 1)).unwrap();
        let pos6 = s11.indices.iter().position(|&i| i == 6).unwrap();
        let pos9 = s11.indices.iter().position(|&i| i == 9).unwrap();
        assert!((s11.block.get(pos6, pos9).re - p / 4.0).abs() < 1e-15);
        assert!((s11.block.get(pos9, pos6).re - p / 4.0).abs() < 1e-15);
    }

    #[test]
    fn sectors_of_maximally_mixed_are_diagonal() {
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let rho = ComplexMatrix::identity(4).unwrap().scaled(0.25);
        let dec = sectors(&rho, &fact, &layout2(), &charges).unwrap();
        for s in &dec.sectors {
            assert!(s.block.is_diagonal(0.0));
        }
        let dims: usize = dec.sectors.iter().map(|s| s.indices.len()).sum();
        assert_eq!(dims, 4);
    }

    #[test]
    fn sectors_reject_untwirled_input() {
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let rho = bell_psi().density(); // has cross-sector coherence
        assert!(matches!(
            sectors(&rho, &fact, &layout2(), &charges),
            Err(Error::NotTwirled(_))
        ));
    }

    #[test]
    fn ssr_purity_checks() {
        let charges = ChargeAssignment::per_particle_slot(2);
        assert!(is_ssr_pure(&bell_psi(), &charges));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz_like = Ket::new(vec![
            C64::new(h, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
        ])
        .unwrap();
        assert!(!is_ssr_pure(&ghz_like, &charges));
        let basis = Ket::basis(4, 0).unwrap();
        assert!(is_ssr_pure(&basis, &charges));
    }

    #[test]
    fn lone_frame_coherence_is_locally_forbidden() {
        // the |01><10| coherence links (q_a, q_b) = (1,0) and (0,1), so
        // a twirl applied to the frame alone leaves it diagonal
        let fact = QubitFactorization::new(2).unwrap();
        let charges = ChargeAssignment::per_particle_slot(2);
        let w = werner(0.5).unwrap();
        let tw = twirl(&w, &fact, &layout2(), &charges);
        assert!(tw.is_diagonal(1e-15));
        assert!((tw.trace().re - 1.0).abs() < 1e-14);
    }
}
