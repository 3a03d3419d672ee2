//! Seeded random instances.
//!
//! All generators draw from ChaCha20. A run seed selects the key and each
//! independent unit of work (a verification trial, a CLI draw) gets its own
//! 64-bit stream number, so results do not depend on evaluation order or
//! thread count and are identical across platforms.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::bipartite::BipartiteVector;
use crate::matcore::{c64, ComplexMatrix, ComplexVector};
use num_complex::Complex64;

pub type TrialRng = ChaCha20Rng;

/// Generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream number for trial `trial` of suite `suite`.
pub fn stream_id(suite: u32, trial: u32) -> u64 {
    (u64::from(suite) << 32) | u64::from(trial)
}

/// Standard complex normal: real and imaginary parts independent `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = ComplexVector::from_fn(dim, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > 1e-8 {
            return v.unscale(n);
        }
    }
}

/// Haar-random unitary (QR of a Ginibre matrix with the phases of `R` divided out).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = QR::new(ginibre(rng, n, n));
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Unit bipartite vector with i.i.d. complex normal coefficients.
pub fn state<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> BipartiteVector {
    loop {
        let c = ginibre(rng, dim_a, dim_b);
        let n = c.norm();
        if n > 1e-8 {
            return BipartiteVector::new(c.unscale(n)).expect("finite coefficients");
        }
    }
}

/// Unit vector whose reductions both have full rank (rejection sampling).
///
/// Requires `dim_a == dim_b`; otherwise no such vector exists.
pub fn entangled_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> BipartiteVector {
    loop {
        let psi = state(rng, dim, dim);
        if crate::modular::gns_check(&psi) {
            return psi;
        }
    }
}

/// Random positive semidefinite matrix `G G†` with `G` Ginibre `n x k`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, k);
    &g * g.adjoint()
}

/// Random density matrix (unit trace).
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let p = psd(rng, n, n);
    let t = p.trace().re;
    p.unscale(t)
}

/// The state the CLI `random` command prints for `(seed, dims)`.
pub fn random_state(dim_a: usize, dim_b: usize, seed: u64, entangled: bool) -> BipartiteVector {
    let mut rng = rng_for(seed, ((dim_a as u64) << 32) | dim_b as u64);
    if entangled && dim_a == dim_b {
        entangled_state(&mut rng, dim_a)
    } else {
        state(&mut rng, dim_a, dim_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{identity, max_abs_diff};

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_state(3, 2, 7, false), random_state(3, 2, 7, false));
        assert_ne!(random_state(3, 2, 7, false), random_state(3, 2, 8, false));
    }

    #[test]
    fn unit_norm() {
        for seed in 0..20 {
            assert!((random_state(4, 3, seed, false).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entangled_flag() {
        for seed in 0..20 {
            assert!(crate::modular::gns_check(&random_state(2, 2, seed, true)));
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_for(1, 0);
        let u = unitary(&mut rng, 5);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(5)) < 1e-13);
    }

    #[test]
    fn streams_are_independent() {
        let a = ginibre(&mut rng_for(3, stream_id(0, 1)), 2, 2);
        let b = ginibre(&mut rng_for(3, stream_id(0, 2)), 2, 2);
        assert_ne!(a, b);
    }
}
