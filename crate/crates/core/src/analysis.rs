//! Exact capacity arithmetic.
//!
//! Everything here is a closed-form rational in the catalog parameters; no
//! floats, no scheme divisibility requirements. The central quantity is the
//! expected download E[D] = Σ_i L_i N^{-(i-1)} over length-sorted messages,
//! which both retrieval schemes attain: capacity is E[L]/E[D] and message j is
//! retrieved at rate L_j/E[D].

use num::{BigRational, One, Zero};

use crate::catalog::{expected_length, Catalog};

/// Best achievable rate E[L]/E[D] for this catalog.
pub fn semantic_capacity(catalog: &Catalog) -> BigRational {
    expected_length(catalog) / download_denominator(catalog)
}

/// Benchmark capacity for equal-length messages: (1 + 1/N + … + 1/N^(K−1))⁻¹.
pub fn classical_capacity(n_databases: u16, message_count: usize) -> BigRational {
    assert!(n_databases >= 2 && message_count >= 1);
    let n = BigRational::from_integer(n_databases.into());
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for _ in 0..message_count {
        sum += term.clone();
        term /= n.clone();
    }
    sum.recip()
}

/// Σ_i N^{-(i-1)}(L_i − E[L]) and whether it is strictly negative, i.e.
/// whether this catalog beats the classical benchmark.
///
/// The equivalent prior-pairwise form Σ_i Σ_j p_j N^{-(i-1)}(L_i − L_j) is
/// evaluated too and checked for exact agreement.
pub fn gain_condition(catalog: &Catalog) -> (BigRational, bool) {
    let mean = expected_length(catalog);
    let n = BigRational::from_integer(catalog.n_databases().into());
    let mut lhs = BigRational::zero();
    let mut pairwise = BigRational::zero();
    let mut weight = BigRational::one();
    for mi in catalog.messages() {
        let li = BigRational::from_integer(mi.length_bits.into());
        lhs += weight.clone() * (li.clone() - mean.clone());
        for mj in catalog.messages() {
            let lj = BigRational::from_integer(mj.length_bits.into());
            pairwise += mj.prior.clone() * weight.clone() * (li.clone() - lj);
        }
        weight /= n.clone();
    }
    assert_eq!(lhs, pairwise, "the two gain-condition forms are one identity");
    let gain = lhs < BigRational::zero();
    (lhs, gain)
}

/// Rate of the naive workaround that pads every message to L_1 and runs the
/// classical scheme: E[L] / (L_1 · Σ_i N^{-(i-1)}).
pub fn zero_pad_rate(catalog: &Catalog) -> BigRational {
    let l1 = BigRational::from_integer(catalog.lengths()[0].into());
    expected_length(catalog) / (l1 * geometric_sum(catalog))
}

/// Exact mean download of the capacity-achieving schemes.
pub fn download_denominator(catalog: &Catalog) -> BigRational {
    let n = BigRational::from_integer(catalog.n_databases().into());
    let mut sum = BigRational::zero();
    let mut weight = BigRational::one();
    for m in catalog.messages() {
        sum += weight.clone() * BigRational::from_integer(m.length_bits.into());
        weight /= n.clone();
    }
    sum
}

fn geometric_sum(catalog: &Catalog) -> BigRational {
    let n = BigRational::from_integer(catalog.n_databases().into());
    let mut sum = BigRational::zero();
    let mut weight = BigRational::one();
    for _ in 0..catalog.message_count() {
        sum += weight.clone();
        weight /= n.clone();
    }
    sum
}

/// Every capacity-related quantity for one catalog, cross-checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityReport {
    pub semantic_capacity: BigRational,
    pub classical_capacity: BigRational,
    pub zero_pad_rate: BigRational,
    pub gain_lhs: BigRational,
    pub gain: bool,
    /// R_j = L_j / E[D] per message, catalog (sorted) order.
    pub per_message_rates: Vec<BigRational>,
    pub expected_download: BigRational,
}

pub fn capacity_report(catalog: &Catalog) -> CapacityReport {
    let expected_download = download_denominator(catalog);
    let semantic = semantic_capacity(catalog);
    let classical = classical_capacity(catalog.n_databases(), catalog.message_count());
    let pad = zero_pad_rate(catalog);
    let (gain_lhs, gain) = gain_condition(catalog);
    let per_message_rates: Vec<BigRational> = catalog
        .lengths()
        .iter()
        .map(|&l| BigRational::from_integer(l.into()) / expected_download.clone())
        .collect();

    let weighted: BigRational = catalog
        .messages()
        .iter()
        .zip(&per_message_rates)
        .map(|(m, r)| m.prior.clone() * r.clone())
        .sum();
    assert_eq!(weighted, semantic, "prior-weighted per-message rates must equal capacity");
    assert!(pad <= semantic, "padding can never beat the adaptive schemes");
    assert_eq!(gain, semantic > classical, "gain verdict must match the capacity comparison");

    CapacityReport {
        semantic_capacity: semantic,
        classical_capacity: classical,
        zero_pad_rate: pad,
        gain_lhs,
        gain,
        per_message_rates,
        expected_download,
    }
}
