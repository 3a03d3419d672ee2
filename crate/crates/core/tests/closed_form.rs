//! Hand-computed values for small instances.

use eprmap::antilinear::AntilinearMap;
use eprmap::matcore::{self, c64, max_abs_diff, ComplexMatrix, ComplexVector, Subsystem};
use eprmap::{bipartite, modular, teleport, BipartiteVector, Error};

fn diag_state(entries: &[f64]) -> BipartiteVector {
    let d = ComplexVector::from_iterator(entries.len(), entries.iter().map(|&x| c64(x, 0.0)));
    BipartiteVector::new(ComplexMatrix::from_diagonal(&d)).unwrap()
}

fn bell() -> BipartiteVector {
    BipartiteVector::maximally_entangled(2)
}

fn e(d: usize, i: usize) -> ComplexVector {
    ComplexVector::from_fn(d, |k, _| c64(if k == i { 1.0 } else { 0.0 }, 0.0))
}

#[test]
fn skewed_ancilla_fidelity() {
    let tm = teleport::teleport_map(&bell(), &diag_state(&[0.8f64.sqrt(), 0.2f64.sqrt()])).unwrap();
    let (trace_norm, fidelity) = teleport::trace_norm_fidelity(&tm).unwrap();
    let expected = 0.4f64.sqrt() + 0.1f64.sqrt();
    assert!((expected - 0.948_683_298_050_513_8).abs() < 1e-15);
    assert!((trace_norm - expected).abs() < 1e-12);
    assert!((fidelity - expected).abs() < 1e-12);
    assert!((teleport::success_bound(&tm).unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn product_source_bound() {
    // ρ = |u⟩⟨u| on b gives the bound ⟨u, ω u⟩.
    let u = ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
    let psi = BipartiteVector::product(&e(2, 1), &u).unwrap();
    let phi = diag_state(&[0.8f64.sqrt(), 0.2f64.sqrt()]);
    let tm = teleport::teleport_map(&psi, &phi).unwrap();
    // ω^b of φ is diag(0.8, 0.2) in the b-factor; ρ = |ū⟩⟨ū| after the transpose.
    let expected = 0.36 * 0.8 + 0.64 * 0.2;
    assert!((teleport::success_bound(&tm).unwrap() - expected).abs() < 1e-12);
    assert_eq!(matcore::svd(&tm.t).unwrap().rank, 1);
}

#[test]
fn bell_chain_is_quarter_identity() {
    let stages = vec![bell(); 4];
    let t = teleport::chain_teleport(&stages).unwrap();
    assert!(max_abs_diff(&t, &matcore::identity(2).scale(0.25)) < 1e-14);
    let out = teleport::chain_oracle(&e(2, 1), &stages).unwrap();
    assert!(matcore::vec_diff(&out, &e(2, 1).scale(0.25)) < 1e-14);
}

#[test]
fn chain_needs_four_stages() {
    assert!(matches!(
        teleport::chain_teleport(&vec![bell(); 3]),
        Err(Error::OddParity { factors: 3 })
    ));
    assert!(matches!(teleport::chain_teleport(&vec![bell(); 6]), Err(Error::DimMismatch(_))));
}

#[test]
fn bell_partner_operator() {
    let a = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0)]));
    let b = bipartite::partner_operator(&a, &bipartite::polar_ba(&bell())).unwrap();
    let tb = (bipartite::reduced(&bell(), Subsystem::B) * b).trace();
    assert!((tb - c64(1.5, 0.0)).norm() < 1e-14);
}

#[test]
fn bell_purification() {
    let omega = matcore::identity(2).scale(0.5);
    let psi = bipartite::purification_from_isometry(&omega, &AntilinearMap::conjugation(2)).unwrap();
    assert!(max_abs_diff(psi.coeff(), bell().coeff()) < 1e-15);
}

#[test]
fn full_bell_measurement_effect() {
    let s = 0.5f64.sqrt();
    let bell_basis: Vec<BipartiteVector> = [
        [s, 0.0, 0.0, s],
        [s, 0.0, 0.0, -s],
        [0.0, s, s, 0.0],
        [0.0, s, -s, 0.0],
    ]
    .iter()
    .map(|c| BipartiteVector::new(ComplexMatrix::from_row_iterator(2, 2, c.iter().map(|&x| c64(x, 0.0)))).unwrap())
    .collect();
    let ch = teleport::luders_channel(&bell_basis, &bell()).unwrap();
    let bounds = teleport::luders_bounds(&ch).unwrap();
    assert!((bounds.op_bound - 1.0).abs() < 1e-14);
    assert!((bounds.trace_bound - 1.0).abs() < 1e-14);
    for t in &ch.maps {
        // each outcome is I/2 up to a Pauli
        let u = t.scale(2.0);
        assert!(max_abs_diff(&(u.adjoint() * &u), &matcore::identity(2)) < 1e-14);
    }
}

#[test]
fn bell_modular_conjugation_swaps_and_conjugates() {
    let t = modular::tomita_S(&bell(), &bell()).unwrap();
    let u = ComplexVector::from_vec(vec![c64(0.6, 0.8), c64(0.0, 0.0)]);
    let v = ComplexVector::from_vec(vec![c64(0.0, 0.0), c64(0.0, 1.0)]);
    let out = t.j.apply(&matcore::kron_vec(&u, &v)).unwrap();
    assert!(matcore::vec_diff(&out, &matcore::kron_vec(&v.conjugate(), &u.conjugate())) < 1e-14);
}
