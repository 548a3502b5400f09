//! Size accounting for the reduction to the base group on doubling
//! families `A_k` producing `w^(2^k)`.

use num_bigint::{BigInt, BigUint};

use crate::phi::{linear_size_coefficients, reduce_to_base, size_bound};
use crate::slp::Slp;
use crate::tower::Tower;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq)]
pub struct SizeRow {
    pub k: usize,
    /// `|A|`
    pub input_size: usize,
    /// `|A_1|`
    pub output_size: usize,
    /// Counting bound for this instance.
    pub bound: BigUint,
    /// Decimal `P`.
    pub p: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeGrowth {
    pub rows: Vec<SizeRow>,
    /// Least-squares fit `|A_1| ~ slope |A| + intercept`.
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation from the fit, relative to `|A_1|`.
    pub max_relative_residual: f64,
    /// Coefficients of the linear bound `C1 |A| + C2` for this tower.
    pub c1: f64,
    pub c2: f64,
}

impl SizeGrowth {
    /// Every row within its instance bound and within `C1 |A| + C2`.
    pub fn within_bounds(&self) -> bool {
        self.rows.iter().all(|r| {
            BigUint::from(r.output_size) <= r.bound && r.output_size as f64 <= self.c1 * r.input_size as f64 + self.c2
        })
    }
}

/// The doubling chain producing `w^(2^k)`: the halving program of `w`
/// followed by `k` doublings.
pub fn doubling_family(w: &Word, k: usize) -> Slp {
    Slp::power(w, &(BigInt::from(1) << k))
}

pub fn size_growth(tower: &Tower, w: &Word, ks: impl IntoIterator<Item = usize>) -> SizeGrowth {
    let (c1, c2) = linear_size_coefficients(tower);
    let mut rows = Vec::new();
    for k in ks {
        let a = doubling_family(w, k);
        let rep = reduce_to_base(tower, &a, false);
        rows.push(SizeRow {
            k,
            input_size: rep.input_size,
            output_size: rep.base_size,
            bound: size_bound(tower, rep.input_size, &rep.p),
            p: rep.p.p().to_string(),
        });
    }
    let (slope, intercept) = fit(&rows);
    let max_relative_residual = rows
        .iter()
        .map(|r| {
            let pred = slope * r.input_size as f64 + intercept;
            (r.output_size as f64 - pred).abs() / (r.output_size as f64).max(1.0)
        })
        .fold(0.0, f64::max);
    SizeGrowth { rows, slope, intercept, max_relative_residual, c1, c2 }
}

fn fit(rows: &[SizeRow]) -> (f64, f64) {
    let n = rows.len() as f64;
    if rows.is_empty() {
        return (0.0, 0.0);
    }
    let mx = rows.iter().map(|r| r.input_size as f64).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.output_size as f64).sum::<f64>() / n;
    let sxx: f64 = rows.iter().map(|r| (r.input_size as f64 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| (r.input_size as f64 - mx) * (r.output_size as f64 - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_family() {
        let t = Tower::parse("base a b\nlevel { centralizer u=\"a b\" letters t }").unwrap();
        let g = size_growth(&t, &t.alphabet().parse_word("t a").unwrap(), []);
        assert!(g.rows.is_empty());
        assert!(g.within_bounds());
    }

    #[test]
    fn g1_doubling_is_linear() {
        let t = Tower::parse("base a b\nlevel { centralizer u=\"a b\" letters t }").unwrap();
        let g = size_growth(&t, &t.alphabet().parse_word("t a t^-1 b").unwrap(), 5..=20);
        assert_eq!(g.rows.len(), 16);
        assert!(g.within_bounds(), "{g:?}");
        assert!(g.max_relative_residual < 0.05, "{g:?}");
        assert!(g.rows.windows(2).all(|p| p[0].output_size <= p[1].output_size));
    }
}
