//! Two-particle amplitude model and the relabeling operation behind
//! duality in entanglement.
//!
//! A [`TwoParticleState`] stores first-quantized amplitudes over
//! (polarization, momentum) per particle slot. [`relabel`] turns it into
//! a bipartite state whose parties are identified by one degree of
//! freedom (momentum or polarization); the other degree of freedom,
//! together with a species register for distinguishable particles,
//! becomes the party's local system.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, Ket, QubitFactorization, STRUCTURAL_TOL};
use crate::ssr::ChargeAssignment;
use crate::states::PartyLayout;

type C64 = Complex64;

/// Exchange statistics of the two particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Bosonic,
    Distinguishable,
}

/// Particle species for distinguishable pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    A,
    B,
}

/// Degree of freedom used to label (distinguish) the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelDof {
    Momentum,
    Polarization,
}

impl LabelDof {
    fn name(self) -> &'static str {
        match self {
            LabelDof::Momentum => "momentum",
            LabelDof::Polarization => "polarization",
        }
    }
}

/// First-quantized amplitudes of a two-particle state, indexed by
/// (pol1, mom1, pol2, mom2) with H, k encoded as 0 and V, kbar as 1.
///
/// For distinguishable pairs, slot 1 carries species a and slot 2
/// species b.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleState {
    statistics: Statistics,
    amps: [C64; 16],
    species_tags: Option<[Species; 2]>,
}

#[inline]
fn amp_index(pol1: usize, mom1: usize, pol2: usize, mom2: usize) -> usize {
    pol1 << 3 | mom1 << 2 | pol2 << 1 | mom2
}

impl TwoParticleState {
    /// Validating constructor: amplitudes must be normalized within
    /// 1e-12, and bosonic tables must be exchange-symmetric.
    pub fn new(statistics: Statistics, amps: [C64; 16]) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let state = Self {
            statistics,
            amps,
            species_tags: match statistics {
                Statistics::Bosonic => None,
                Statistics::Distinguishable => Some([Species::A, Species::B]),
            },
        };
        if statistics == Statistics::Bosonic && !state.is_exchange_symmetric(STRUCTURAL_TOL) {
            return Err(Error::InvalidLayout(
                "bosonic amplitude table must be exchange-symmetric".into(),
            ));
        }
        Ok(state)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn species_tags(&self) -> Option<[Species; 2]> {
        self.species_tags
    }

    #[inline]
    pub fn amplitude(&self, pol1: usize, mom1: usize, pol2: usize, mom2: usize) -> C64 {
        self.amps[amp_index(pol1, mom1, pol2, mom2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// True when the table is invariant under simultaneous exchange of
    /// the slot-1 and slot-2 indices.
    pub fn is_exchange_symmetric(&self, tol: f64) -> bool {
        for p1 in 0..2 {
            for m1 in 0..2 {
                for p2 in 0..2 {
                    for m2 in 0..2 {
                        let a = self.amplitude(p1, m1, p2, m2);
                        let b = self.amplitude(p2, m2, p1, m1);
                        if (a - b).norm() > tol {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Amplitudes as a 4-slot ket in the order (pol1, mom1, pol2, mom2).
    pub fn to_ket(&self) -> Ket {
        Ket::new(self.amps.to_vec()).expect("state is normalized by construction")
    }
}

/// Both PDC photons in the first-quantized symmetric form: four terms of
/// amplitude 1/2 pairing opposite polarizations with opposite momenta.
pub fn pdc_bosonic() -> TwoParticleState {
    let mut amps = [C64::new(0.0, 0.0); 16];
    let half = C64::new(0.5, 0.0);
    // (H,k)(V,kbar) + (V,k)(H,kbar) + (H,kbar)(V,k) + (V,kbar)(H,k)
    amps[amp_index(0, 0, 1, 1)] = half;
    amps[amp_index(1, 0, 0, 1)] = half;
    amps[amp_index(0, 1, 1, 0)] = half;
    amps[amp_index(1, 1, 0, 0)] = half;
    TwoParticleState::new(Statistics::Bosonic, amps).expect("exact amplitudes")
}

/// Distinguishable pair: species a travels with momentum k, species b
/// with kbar, and the polarizations are anti-correlated.
pub fn pdc_distinguishable() -> TwoParticleState {
    let mut amps = [C64::new(0.0, 0.0); 16];
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[amp_index(0, 0, 1, 1)] = h; // (H,k)_a (V,kbar)_b
    amps[amp_index(1, 0, 0, 1)] = h; // (V,k)_a (H,kbar)_b
    TwoParticleState::new(Statistics::Distinguishable, amps).expect("exact amplitudes")
}

/// Distinguishable pair with the exchanged terms added back in: the
/// four-term state whose amplitude table is exchange-symmetric even
/// though the species tags still distinguish the slots.
pub fn symmetrized_distinguishable() -> TwoParticleState {
    let mut amps = [C64::new(0.0, 0.0); 16];
    let half = C64::new(0.5, 0.0);
    amps[amp_index(0, 0, 1, 1)] = half; // (H,k)_a (V,kbar)_b
    amps[amp_index(1, 0, 0, 1)] = half; // (V,k)_a (H,kbar)_b
    amps[amp_index(1, 1, 0, 0)] = half; // (V,kbar)_a (H,k)_b
    amps[amp_index(0, 1, 1, 0)] = half; // (H,kbar)_a (V,k)_b
    TwoParticleState::new(Statistics::Distinguishable, amps).expect("exact amplitudes")
}

/// A bipartite state obtained by labeling the particles with one degree
/// of freedom. Parties are ordered so that the label values k (or H)
/// come first.
#[derive(Debug, Clone)]
pub struct LabeledBipartiteState {
    pub label_dof: LabelDof,
    pub rho: ComplexMatrix,
    pub fact: QubitFactorization,
    pub layout: PartyLayout,
    pub charges: ChargeAssignment,
}

impl LabeledBipartiteState {
    /// Effective state after removing the coherences forbidden by the
    /// particle-type superselection rule.
    pub fn twirled(&self) -> ComplexMatrix {
        crate::ssr::twirl(&self.rho, &self.fact, &self.layout, &self.charges)
    }
}

fn split_label(label: LabelDof, pol: usize, mom: usize) -> (usize, usize) {
    match label {
        LabelDof::Momentum => (mom, pol),
        LabelDof::Polarization => (pol, mom),
    }
}

/// Reindex a two-particle state as a bipartite state with parties given
/// by the label degree of freedom.
///
/// Every nonzero term must put the two particles on distinct label
/// values; otherwise the post-selection behind the labeling fails. For
/// bosonic states the exchange redundancy is divided out and the result
/// is a 2-qubit state holding the other degree of freedom. For
/// distinguishable states each party keeps (other DoF, species register)
/// and only the species slots carry superselection charge.
pub fn relabel(state: &TwoParticleState, label: LabelDof) -> Result<LabeledBipartiteState> {
    for p1 in 0..2 {
        for m1 in 0..2 {
            for p2 in 0..2 {
                for m2 in 0..2 {
                    if state.amplitude(p1, m1, p2, m2).norm() <= STRUCTURAL_TOL {
                        continue;
                    }
                    let (l1, _) = split_label(label, p1, m1);
                    let (l2, _) = split_label(label, p2, m2);
                    if l1 == l2 {
                        return Err(Error::LabelCollision(label.name()));
                    }
                }
            }
        }
    }

    match state.statistics {
        Statistics::Bosonic => {
            // keep the terms where slot 1 carries label value 0, then
            // renormalize away the exchange redundancy
            let mut amps = vec![C64::new(0.0, 0.0); 4];
            for p1 in 0..2 {
                for m1 in 0..2 {
                    for p2 in 0..2 {
                        for m2 in 0..2 {
                            let a = state.amplitude(p1, m1, p2, m2);
                            if a.norm() <= STRUCTURAL_TOL {
                                continue;
                            }
                            let (l1, o1) = split_label(label, p1, m1);
                            let (_, o2) = split_label(label, p2, m2);
                            if l1 == 0 {
                                amps[o1 << 1 | o2] += a;
                            }
                        }
                    }
                }
            }
            let ket = Ket::normalized(amps)?;
            Ok(LabeledBipartiteState {
                label_dof: label,
                rho: ket.density(),
                fact: QubitFactorization::new(2)?,
                layout: PartyLayout::new(vec![0], vec![1], 2)?,
                charges: ChargeAssignment::chargeless(2),
            })
        }
        Statistics::Distinguishable => {
            // slots: (other_A, species_A, other_B, species_B); species a
            // encodes as 0, species b as 1
            let mut amps = vec![C64::new(0.0, 0.0); 16];
            for p1 in 0..2 {
                for m1 in 0..2 {
                    for p2 in 0..2 {
                        for m2 in 0..2 {
                            let a = state.amplitude(p1, m1, p2, m2);
                            if a.norm_sqr() == 0.0 {
                                continue;
                            }
                            let (l1, o1) = split_label(label, p1, m1);
                            let (_, o2) = split_label(label, p2, m2);
                            // slot 1 is species a (0), slot 2 species b (1)
                            let (oa, sa, ob, sb) = if l1 == 0 {
                                (o1, 0usize, o2, 1usize)
                            } else {
                                (o2, 1usize, o1, 0usize)
                            };
                            amps[oa << 3 | sa << 2 | ob << 1 | sb] += a;
                        }
                    }
                }
            }
            let ket = Ket::new(amps)?;
            Ok(LabeledBipartiteState {
                label_dof: label,
                rho: ket.density(),
                fact: QubitFactorization::new(4)?,
                layout: PartyLayout::new(vec![0, 1], vec![2, 3], 4)?,
                charges: ChargeAssignment::from_per_slot(vec![[0, 0], [1, 0], [0, 0], [1, 0]]),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::hyper_state;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bosonic_pair_matches_symmetric_form() {
        let s = pdc_bosonic();
        let mut nonzero = 0;
        for p1 in 0..2 {
            for m1 in 0..2 {
                for p2 in 0..2 {
                    for m2 in 0..2 {
                        let a = s.amplitude(p1, m1, p2, m2);
                        if a.norm() > 1e-15 {
                            assert!((a.re - 0.5).abs() < 1e-15);
                            assert_ne!(p1, p2);
                            assert_ne!(m1, m2);
                            nonzero += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(nonzero, 4);
        assert!(s.is_exchange_symmetric(0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bosonic_pair_equals_hyper_state() {
        let s = pdc_bosonic();
        let hyper = hyper_state();
        // hyper slots are (pol1, pol2, mom1, mom2)
        for p1 in 0..2 {
            for m1 in 0..2 {
                for p2 in 0..2 {
                    for m2 in 0..2 {
                        let hyper_index = p1 << 3 | p2 << 2 | m1 << 1 | m2;
                        let diff = s.amplitude(p1, m1, p2, m2) - hyper.amplitude(hyper_index);
                        assert!(diff.norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn distinguishable_pair_amplitudes() {
        let s = pdc_distinguishable();
        assert!((s.amplitude(0, 0, 1, 1).re - H).abs() < 1e-15);
        assert!((s.amplitude(1, 0, 0, 1).re - H).abs() < 1e-15);
        assert!(!s.is_exchange_symmetric(1e-6));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.species_tags(), Some([Species::A, Species::B]));
    }

    #[test]
    fn symmetrized_pair_is_symmetric_despite_tags() {
        let s = symmetrized_distinguishable();
        let mut nonzero = 0;
        for i in 0..16 {
            let a = s.amps[i];
            if a.norm() > 1e-15 {
                assert!((a.re - 0.5).abs() < 1e-15);
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 4);
        assert!(s.is_exchange_symmetric(0.0));
        assert_eq!(s.statistics(), Statistics::Distinguishable);
    }

    #[test]
    fn bosonic_relabeling_gives_bell_pair_both_ways() {
        for label in [LabelDof::Momentum, LabelDof::Polarization] {
            let lab = relabel(&pdc_bosonic(), label).unwrap();
            assert_eq!(lab.rho.dim(), 4);
            let expected = crate::states::bell_psi().density();
            assert!(lab.rho.max_abs_diff(&expected) < 1e-14, "label {label:?}");
            assert!((lab.rho.trace().re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn distinguishable_momentum_labeling() {
        let lab = relabel(&pdc_distinguishable(), LabelDof::Momentum).unwrap();
        assert_eq!(lab.rho.dim(), 16);
        // (|H,a> |V,b> + |V,a> |H,b|)/sqrt2 -> indices 0b0011 and 0b1001
        let i = 0b0011;
        let j = 0b1001;
        assert!((lab.rho.get(i, i).re - 0.5).abs() < 1e-14);
        assert!((lab.rho.get(j, j).re - 0.5).abs() < 1e-14);
        assert!((lab.rho.get(i, j).re - 0.5).abs() < 1e-14);
        assert!((lab.rho.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distinguishable_polarization_labeling() {
        let lab = relabel(&pdc_distinguishable(), LabelDof::Polarization).unwrap();
        // (|k,a>_H |kbar,b>_V + |kbar,b>_H |k,a>_V)/sqrt2
        //   -> indices 0b0011 and 0b1100
        let i = 0b0011;
        let j = 0b1100;
        assert!((lab.rho.get(i, i).re - 0.5).abs() < 1e-14);
        assert!((lab.rho.get(j, j).re - 0.5).abs() < 1e-14);
        assert!((lab.rho.get(i, j).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn relabel_preserves_normalization() {
        for state in [pdc_bosonic(), pdc_distinguishable(), symmetrized_distinguishable()] {
            for label in [LabelDof::Momentum, LabelDof::Polarization] {
                let lab = relabel(&state, label).unwrap();
                assert!((lab.rho.trace().re - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn relabel_rejects_label_collisions() {
        // both particles share momentum k: labeling by momentum fails
        let mut amps = [C64::new(0.0, 0.0); 16];
        amps[amp_index(0, 0, 1, 0)] = C64::new(H, 0.0);
        amps[amp_index(1, 0, 0, 0)] = C64::new(H, 0.0);
        let state = TwoParticleState::new(Statistics::Distinguishable, amps).unwrap();
        assert!(matches!(
            relabel(&state, LabelDof::Momentum),
            Err(Error::LabelCollision("momentum"))
        ));
        // the same state still supports polarization labeling
        assert!(relabel(&state, LabelDof::Polarization).is_ok());
    }

    #[test]
    fn twirled_polarization_labeling_is_operationally_mixed() {
        let lab = relabel(&pdc_distinguishable(), LabelDof::Polarization).unwrap();
        let eff = lab.twirled();
        assert!(eff.is_diagonal(1e-15));
        let mut diag: Vec<(usize, f64)> = (0..16)
            .map(|i| (i, eff.get(i, i).re))
            .filter(|(_, v)| v.abs() > 1e-15)
            .collect();
        diag.sort_by_key(|&(i, _)| i);
        assert_eq!(diag.len(), 2);
        assert!((diag[0].1 - 0.5).abs() < 1e-14);
        assert!((diag[1].1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn twirled_momentum_labeling_keeps_coherence() {
        let lab = relabel(&pdc_distinguishable(), LabelDof::Momentum).unwrap();
        let eff = lab.twirled();
        assert!(eff.max_abs_diff(&lab.rho) < 1e-15);
    }

    #[test]
    fn bosonic_constructor_rejects_asymmetric_tables() {
        let mut amps = [C64::new(0.0, 0.0); 16];
        amps[amp_index(0, 0, 1, 1)] = C64::new(1.0, 0.0);
        assert!(TwoParticleState::new(Statistics::Bosonic, amps).is_err());
    }
}
