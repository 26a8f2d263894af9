//! Sampling the truncated Hilbert brick `HB^{≤m}`: one independent uniform
//! draw from the unit Bombieri ball per degree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polyalg::{
    compositions, diagonalize_quadratic, multinomial, ActionPolynomial, Frequency, GradedPolynomial,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickSample {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// `h_1, …, h_m`; `h_k` is homogeneous of degree `k`.
    pub parts: Vec<ActionPolynomial>,
}

/// Substream for degree `k`: ChaCha20 keyed by `SHA-256("brick" ‖ seed ‖ k)`.
pub fn degree_stream(seed: u64, k: usize) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"brick");
    h.update(seed.to_le_bytes());
    h.update((k as u64).to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

/// Uniform draw from the unit ball of degree-`k` homogeneous polynomials in
/// `n` actions for the Bombieri inner product.
pub fn sample_degree<G: Rng + ?Sized>(n: usize, k: usize, rng: &mut G) -> ActionPolynomial {
    let basis = compositions(n, k);
    let dim = basis.len();
    let q: Vec<f64> = loop {
        let q: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if q.iter().any(|v: &f64| *v != 0.0) {
            break q;
        }
    };
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let radius = u.powf(1.0 / dim as f64);
    let terms = basis.iter().zip(&q).map(|(l, &qi)| {
        (
            l.as_slice().to_vec(),
            qi / norm * radius * multinomial(l.as_slice()).sqrt(),
        )
    });
    ActionPolynomial::from_terms(n, terms).expect("basis exponents have length n")
}

pub fn sample_brick(n: usize, m: usize, seed: u64) -> Result<BrickSample> {
    if n == 0 || m == 0 {
        return Err(Error::Domain(format!(
            "sample_brick needs n >= 1 and m >= 1 (got n={n}, m={m})"
        )));
    }
    let parts = (1..=m)
        .map(|k| sample_degree(n, k, &mut degree_stream(seed, k)))
        .collect();
    Ok(BrickSample { seed, n, m, parts })
}

impl BrickSample {
    /// `h_1 + … + h_m`
    pub fn total(&self) -> ActionPolynomial {
        self.parts
            .iter()
            .fold(ActionPolynomial::zero(self.n), |a, p| a.add(p))
    }

    /// Append fresh degrees `m+1..=m2` from the same seed.
    pub fn extend_to(&self, m2: usize) -> BrickSample {
        let mut parts = self.parts.clone();
        for k in self.m + 1..=m2 {
            parts.push(sample_degree(self.n, k, &mut degree_stream(self.seed, k)));
        }
        BrickSample {
            seed: self.seed,
            n: self.n,
            m: m2.max(self.m),
            parts,
        }
    }
}

/// `Σ_k h_k(I(x, y))` as a phase-space polynomial of degree `2m`.
pub fn brick_to_hamiltonian(sample: &BrickSample) -> GradedPolynomial {
    sample.total().to_graded()
}

/// `H + h` together with the frequency of the perturbed quadratic part.
pub fn perturb(
    h: &GradedPolynomial,
    sample: &BrickSample,
) -> Result<(GradedPolynomial, Frequency)> {
    if h.n() != sample.n {
        return Err(Error::Dimension {
            expected: h.n(),
            found: sample.n,
        });
    }
    let out = h.add(&brick_to_hamiltonian(sample));
    let omega = quadratic_frequency(&out)?;
    Ok((out, omega))
}

/// `ω` of the quadratic part: read off directly when it is already `Σ ω_j I_j`,
/// otherwise obtained by symplectic diagonalization.
pub fn quadratic_frequency(h: &GradedPolynomial) -> Result<Frequency> {
    let q = h.homogeneous(2);
    if q.terms().all(|(e, _)| e.is_action()) {
        let n = h.n();
        let mut w = vec![0.0; n];
        for (e, c) in q.terms() {
            let j = e.halves().0.iter().position(|&a| a == 1).unwrap();
            w[j] = c.re;
        }
        return Frequency::new(w);
    }
    Ok(diagonalize_quadratic(&q)?.0)
}
