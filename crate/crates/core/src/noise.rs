//! Depolarizing noise sampling and fixed-weight error enumeration.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::CodeLayout;
use crate::pauli::{Pauli, PauliError};

/// I.i.d. depolarizing channel: X, Y, Z each with probability `p/3`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
    /// Optional per-qubit error probabilities overriding `p`.
    pub per_qubit: Option<Vec<f64>>,
}

impl NoiseModel {
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p, per_qubit: None })
    }

    pub fn with_per_qubit(p: Vec<f64>) -> Result<Self> {
        for &pq in &p {
            check_probability(pq)?;
        }
        let mean = p.iter().sum::<f64>() / p.len().max(1) as f64;
        Ok(Self {
            p: mean,
            per_qubit: Some(p),
        })
    }

    pub fn qubit_probability(&self, q: usize) -> f64 {
        self.per_qubit.as_ref().map_or(self.p, |v| v[q])
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// RNG for stream `stream` of a run seeded with `seed`.
///
/// Each Monte Carlo trial uses its own stream, so results do not depend on
/// how trials are scheduled across threads.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_error<R: Rng + ?Sized>(
    layout: &CodeLayout,
    model: &NoiseModel,
    rng: &mut R,
) -> PauliError {
    let n = layout.n();
    let mut e = PauliError::identity(n);
    for q in 0..n {
        let p = model.qubit_probability(q);
        if p == 0.0 {
            continue;
        }
        let u: f64 = rng.gen();
        if u < p {
            let which = ((u / p) * 3.0) as usize;
            e.set(q, Pauli::NON_IDENTITY[which.min(2)]);
        }
    }
    e
}

/// Number of weight-`w` Pauli patterns on `n` qubits: `C(n, w) * 3^w`.
pub fn pattern_count(n: usize, w: usize) -> u128 {
    binomial(n as u64, w as u64) * 3u128.pow(w as u32)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Every Pauli error of exactly weight `w`, each once.
pub fn enumerate_errors(layout: &CodeLayout, weight: usize) -> impl Iterator<Item = PauliError> {
    let n = layout.n();
    let combos = 3usize.pow(weight as u32);
    (0..n).combinations(weight).flat_map(move |qubits| {
        (0..combos).map(move |mut code| {
            let mut e = PauliError::identity(n);
            for &q in &qubits {
                e.set(q, Pauli::NON_IDENTITY[code % 3]);
                code /= 3;
            }
            e
        })
    })
}
