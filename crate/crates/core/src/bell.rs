//! Bell-inequality evaluation.
//!
//! Two pipelines live here:
//!
//! * the qutrit expression, evaluated through the closed-form maximum over
//!   symmetric-beam-splitter settings
//!   `B = 4 a1 a2 + (4/sqrt 3)(a1 a3 + a2 a3)` for Schmidt coefficients
//!   `a1 >= a2 >= a3`, applied to the qutrit state obtained from the
//!   two-mode squeezed vacuum;
//! * CHSH for `n = 2`, with the qubit operator lifted onto block-replicated
//!   pseudospin operators and evaluated directly in Fock space.
//!
//! Both have local-realistic bound 2.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use crate::bloch::{lift_observable, AmbientState, BlochTensor};
use crate::embedding::build_embedded;
use crate::error::{invalid, Result};
use crate::su::GeneratorSet;
use crate::tensor::{real_part, SparseMatrix};
use crate::{ALGEBRA_TOL, EXPECTATION_TOL};

/// Local-realistic bound shared by both expressions.
pub const LOCAL_BOUND: f64 = 2.0;

/// Default bracket for the maximum search.
pub const DEFAULT_MAX_BRACKET: (f64, f64) = (0.5, 4.0);

const PRESCAN_POINTS: usize = 200;
const GOLDEN_TOL: f64 = 1e-7;

/// Schmidt coefficients of a two-qutrit pure state, `a1² + a2² + a3² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtTriple([f64; 3]);

impl SchmidtTriple {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return invalid("Schmidt coefficients must be finite");
        }
        let norm2: f64 = a.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > ALGEBRA_TOL {
            return invalid(format!(
                "Schmidt coefficients must have unit 2-norm, got |a|² = {norm2}"
            ));
        }
        Ok(Self(a))
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    /// Magnitudes in descending order.
    pub fn sorted(&self) -> [f64; 3] {
        let mut s = self.0.map(f64::abs);
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

/// Closed-form maximal value of the qutrit Bell expression.
pub fn fu_bell_max(a: &SchmidtTriple) -> f64 {
    let [a1, a2, a3] = a.sorted();
    // the formula also requires max a_i <= sqrt(6 + 3 sqrt 3) / 2 ≈ 1.673,
    // implied by the unit norm
    debug_assert!(a1 <= (6.0 + 3.0 * 3f64.sqrt()).sqrt() / 2.0);
    4.0 * a1 * a2 + 4.0 / 3f64.sqrt() * (a1 * a3 + a2 * a3)
}

/// `(1, t, t²) / sqrt(1 + t² + t⁴)` with `t = tanh r`.
pub fn nopa_qutrit_coeffs(r: f64) -> Result<SchmidtTriple> {
    if r.is_nan() || r < 0.0 {
        return invalid(format!("squeezing parameter must be >= 0, got {r}"));
    }
    let t = r.tanh();
    let norm = (1.0 + t * t + t.powi(4)).sqrt();
    SchmidtTriple::new([1.0 / norm, t / norm, t * t / norm])
}

/// `B(r)` for the qutrit state carried by the squeezed vacuum.
pub fn nopa_bell_value(r: f64) -> Result<f64> {
    Ok(fu_bell_max(&nopa_qutrit_coeffs(r)?))
}

fn bell_at(r: f64) -> f64 {
    nopa_bell_value(r).expect("r >= 0 on every internal grid")
}

/// Tabulated `B(r)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BellCurve {
    pub r_min: f64,
    pub r_max: f64,
    pub points: Vec<(f64, f64)>,
}

impl BellCurve {
    pub const FORMULA: &'static str =
        "4 a1 a2 + 4/sqrt(3) (a1 a3 + a2 a3), a(k) = tanh(r)^k / sqrt(1 + tanh(r)^2 + tanh(r)^4)";

    pub fn steps(&self) -> usize {
        self.points.len()
    }
}

/// Grid point `i` of `steps` over `[lo, hi]`, computed directly so every
/// point is independent of evaluation order.
pub fn grid_point(lo: f64, hi: f64, steps: usize, i: usize) -> f64 {
    if i + 1 == steps {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (steps - 1) as f64
    }
}

/// `B(r)` on `steps` uniform points spanning `[r_min, r_max]`. Points are
/// evaluated in parallel and assembled in grid order.
pub fn bell_curve(r_min: f64, r_max: f64, steps: usize) -> Result<BellCurve> {
    if !r_min.is_finite() || !r_max.is_finite() || r_min < 0.0 || r_max <= r_min {
        return invalid(format!("need 0 <= r_min < r_max, got [{r_min}, {r_max}]"));
    }
    if steps < 2 {
        return invalid(format!("need at least 2 grid points, got {steps}"));
    }
    let points = (0..steps)
        .into_par_iter()
        .map(|i| {
            let r = grid_point(r_min, r_max, steps, i);
            (r, bell_at(r))
        })
        .collect();
    Ok(BellCurve { r_min, r_max, points })
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Location and value of the maximal violation inside `[r_lo, r_hi]`.
///
/// A 200-point pre-scan locates the best grid cell; an endpoint maximum
/// means the interval does not bracket an interior peak and is rejected.
pub fn find_max_violation(r_lo: f64, r_hi: f64) -> Result<(f64, f64)> {
    if !r_lo.is_finite() || !r_hi.is_finite() || r_lo < 0.0 || r_hi <= r_lo {
        return invalid(format!("need 0 <= r_lo < r_hi, got [{r_lo}, {r_hi}]"));
    }
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| grid_point(r_lo, r_hi, PRESCAN_POINTS, i))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| bell_at(r)).collect();
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    if best == 0 || best == PRESCAN_POINTS - 1 {
        return invalid(format!("[{r_lo}, {r_hi}] does not bracket an interior maximum of B(r)"));
    }
    Ok(golden_section_max(bell_at, grid[best - 1], grid[best + 1], GOLDEN_TOL))
}

/// Smallest `r` with `B(r) = 2`, by bisection on `[0.3, 0.7]`.
pub fn violation_threshold() -> f64 {
    violation_threshold_in(0.3, 0.7).expect("B crosses 2 inside [0.3, 0.7]")
}

/// Bisection for `B(r) = 2` on a bracket where `B - 2` changes sign.
pub fn violation_threshold_in(lo: f64, hi: f64) -> Result<f64> {
    let g = |r: f64| bell_at(r) - LOCAL_BOUND;
    let (mut lo, mut hi) = (lo, hi);
    if lo.is_nan() || hi.is_nan() || lo < 0.0 || hi <= lo {
        return invalid(format!("bad bisection bracket [{lo}, {hi}]"));
    }
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        return invalid(format!("B(r) - 2 does not change sign on [{lo}, {hi}]"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Four unit measurement directions over the qubit generator triple
/// `(u12, v12, w1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
}

fn unit(v: [f64; 3]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > ALGEBRA_TOL {
        return invalid(format!("measurement direction {v:?} is not a unit vector"));
    }
    Ok(())
}

impl ChshSettings {
    pub fn new(a: [f64; 3], a_prime: [f64; 3], b: [f64; 3], b_prime: [f64; 3]) -> Result<Self> {
        for v in [a, a_prime, b, b_prime] {
            unit(v)?;
        }
        Ok(Self { a, a_prime, b, b_prime })
    }

    /// Directions in the `(u12, w1)` plane given by angles from the `w1` axis.
    pub fn planar(theta_a: f64, theta_a_prime: f64, theta_b: f64, theta_b_prime: f64) -> Self {
        let dir = |t: f64| [t.sin(), 0.0, t.cos()];
        Self {
            a: dir(theta_a),
            a_prime: dir(theta_a_prime),
            b: dir(theta_b),
            b_prime: dir(theta_b_prime),
        }
    }

    /// `a = z`, `a' = x`, `b = (z + x)/sqrt 2`, `b' = (z - x)/sqrt 2`, with
    /// `x = u12` and `z = w1`.
    pub fn textbook() -> Self {
        let h = FRAC_1_SQRT_2;
        Self {
            a: [0.0, 0.0, 1.0],
            a_prime: [1.0, 0.0, 0.0],
            b: [h, 0.0, h],
            b_prime: [-h, 0.0, h],
        }
    }

    /// Coefficient matrix `c_ij` with CHSH `= sum_ij c_ij s_i ⊗ s_j`.
    pub fn coefficients(&self) -> [[f64; 3]; 3] {
        let mut c = [[0.0; 3]; 3];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, cij) in row.iter_mut().enumerate() {
                *cij = self.a[i] * (self.b[j] + self.b_prime[j]) + self.a_prime[i] * (self.b[j] - self.b_prime[j]);
            }
        }
        c
    }

    /// CHSH value for a given correlation matrix `E_ij = <s_i ⊗ s_j>`.
    pub fn evaluate(&self, correlations: &[[f64; 3]; 3]) -> f64 {
        let c = self.coefficients();
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| c[i][j] * correlations[i][j])
            .sum()
    }
}

/// Bloch tensor of `(a·s)⊗(b·s) + (a·s)⊗(b'·s) + (a'·s)⊗(b·s) - (a'·s)⊗(b'·s)`.
pub fn chsh_operator(settings: &ChshSettings, gens: &GeneratorSet) -> Result<BlochTensor> {
    if gens.n() != 2 {
        return invalid(format!("CHSH needs the qubit generator set, got n={}", gens.n()));
    }
    let settings = ChshSettings::new(settings.a, settings.a_prime, settings.b, settings.b_prime)?;
    let c = settings.coefficients();
    BlochTensor::full_correlation_observable(2, 2, |x| c[x[0]][x[1]])
}

/// Lifted CHSH value in a two-mode state, with the pseudospin embedding
/// built over the state's own truncation.
pub fn chsh_cv_expectation(omega: &dyn AmbientState, settings: &ChshSettings) -> Result<f64> {
    if omega.parties() != 2 {
        return invalid("CHSH needs a two-mode state");
    }
    let embedded = build_embedded(omega.ambient(), 2)?;
    let op = lift_observable(&chsh_operator(settings, embedded.base())?, &embedded)?;
    real_part(omega.expectation_of(&op)?, EXPECTATION_TOL)
}

/// `E_ij = <S_i ⊗ S_j>` for the three pseudospin operators.
pub fn pseudospin_correlations(omega: &dyn AmbientState) -> Result<[[f64; 3]; 3]> {
    if omega.parties() != 2 {
        return invalid("correlations need a two-mode state");
    }
    let embedded = build_embedded(omega.ambient(), 2)?;
    let mut e = [[0.0; 3]; 3];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, eij) in row.iter_mut().enumerate() {
            let op = SparseMatrix::kron_all(&[embedded.generator(i), embedded.generator(j)]);
            *eij = real_part(omega.expectation_of(&op)?, EXPECTATION_TOL)?;
        }
    }
    Ok(e)
}

/// Best planar settings for a correlation matrix: a full 15° grid over the
/// four angles, then a 1° grid of ±15° around the best coarse point.
pub fn refine_planar_settings(correlations: &[[f64; 3]; 3]) -> (ChshSettings, f64) {
    let coarse: Vec<f64> = (0..24).map(|k| (k as f64 * 15.0).to_radians()).collect();
    let start = [0.0; 4];
    let (best, _) = grid_search(correlations, &start, |_| coarse.clone());
    let (best, value) = grid_search(correlations, &best, |centre| {
        (-15..=15).map(|d| centre + (d as f64).to_radians()).collect()
    });
    (ChshSettings::planar(best[0], best[1], best[2], best[3]), value)
}

fn grid_search(correlations: &[[f64; 3]; 3], centre: &[f64; 4], axis: impl Fn(f64) -> Vec<f64>) -> ([f64; 4], f64) {
    let axes: Vec<Vec<f64>> = centre.iter().map(|&c| axis(c)).collect();
    let mut best = (*centre, f64::NEG_INFINITY);
    for &ta in &axes[0] {
        for &tap in &axes[1] {
            for &tb in &axes[2] {
                for &tbp in &axes[3] {
                    let v = ChshSettings::planar(ta, tap, tb, tbp).evaluate(correlations);
                    if v > best.1 {
                        best = ([ta, tap, tb, tbp], v);
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{bloch_expectation, decompose, TensorKind};
    use crate::su::build_generators;
    use crate::tensor::{kron, ComplexMatrix, ComplexVector};

    #[test]
    fn fu_examples() {
        assert_eq!(fu_bell_max(&SchmidtTriple::new([1.0, 0.0, 0.0]).unwrap()), 0.0);
        let u = 1.0 / 3f64.sqrt();
        let uniform = fu_bell_max(&SchmidtTriple::new([u, u, u]).unwrap());
        assert!((uniform - (4.0 / 3.0 + 8.0 / (3.0 * 3f64.sqrt()))).abs() < 1e-15);
        assert!((uniform - 2.872934).abs() < 1e-6);
        assert!(SchmidtTriple::new([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn fu_sorts_magnitudes() {
        let t = SchmidtTriple::new([0.3, -0.8, (1.0f64 - 0.09 - 0.64).sqrt()]).unwrap();
        let p = SchmidtTriple::new([-(1.0f64 - 0.09 - 0.64).sqrt(), 0.3, 0.8]).unwrap();
        assert!((fu_bell_max(&t) - fu_bell_max(&p)).abs() < 1e-15);
    }

    #[test]
    fn qutrit_coefficients() {
        assert_eq!(nopa_qutrit_coeffs(0.0).unwrap().values(), [1.0, 0.0, 0.0]);
        // closed form with tanh(1) = 0.7615941559557649
        let a = nopa_qutrit_coeffs(1.0).unwrap().values();
        let expected = [0.7223549, 0.5501412, 0.4189844];
        for (x, y) in a.iter().zip(expected) {
            assert!((x - y).abs() < 1e-7, "{a:?}");
        }
        let u = 1.0 / 3f64.sqrt();
        assert!(nopa_qutrit_coeffs(10.0)
            .unwrap()
            .values()
            .iter()
            .all(|x| (x - u).abs() < 1e-8));
        assert!(nopa_qutrit_coeffs(-1.0).is_err());
    }

    #[test]
    fn curve_values() {
        let curve = bell_curve(0.0, 1.0, 21).unwrap();
        assert_eq!(curve.points[0], (0.0, 0.0));
        assert_eq!(curve.points[20].0, 1.0);
        assert!((bell_at(0.45) - 1.8783).abs() < 1e-4);
        assert!((bell_at(0.55) - 2.1855).abs() < 1e-4);
        assert!(bell_curve(1.0, 1.0, 10).is_err());
        assert!(bell_curve(-1.0, 1.0, 10).is_err());
        assert!(bell_curve(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn maximum_and_brackets() {
        let (r, b) = find_max_violation(0.5, 4.0).unwrap();
        assert!((r - 1.4998).abs() < 5e-3 && (b - 2.9011).abs() < 5e-4);
        let (r2, b2) = find_max_violation(1.4, 1.6).unwrap();
        assert!((r - r2).abs() < 1e-5 && (b - b2).abs() < 1e-10);
        assert!(find_max_violation(3.0, 4.0).is_err());
    }

    #[test]
    fn threshold() {
        let r = violation_threshold();
        assert!(r > 0.48 && r < 0.49);
        assert!((bell_at(r) - 2.0).abs() < 1e-9);
        assert!(violation_threshold_in(1.0, 2.0).is_err());
    }

    #[test]
    fn textbook_chsh_on_phi_plus() {
        let gens = build_generators(2).unwrap();
        let h = FRAC_1_SQRT_2;
        let rho = ComplexMatrix::outer(&ComplexVector::from_real(&[h, 0.0, 0.0, h]).unwrap());
        let t = decompose(&rho, 2, 2, TensorKind::State).unwrap();
        let op = chsh_operator(&ChshSettings::textbook(), &gens).unwrap();
        let value = bloch_expectation(&t, &op).unwrap();
        // dense oracle: Tr(rho CHSH) with the operator assembled from kron products
        let dot = |v: [f64; 3]| {
            (0..3).fold(ComplexMatrix::zeros(2), |acc, i| {
                &acc + &gens.generator(i).scale_real(v[i])
            })
        };
        let s = ChshSettings::textbook();
        let (a, ap, b, bp) = (dot(s.a), dot(s.a_prime), dot(s.b), dot(s.b_prime));
        let dense = &(&(&kron(&a, &b) + &kron(&a, &bp)) + &kron(&ap, &b)) - &kron(&ap, &bp);
        let oracle = (&rho * &dense).trace().re;
        assert!((oracle - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((value - oracle).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_mixed_cases() {
        let gens = build_generators(2).unwrap();
        let z = [0.0, 0.0, 1.0];
        let same = ChshSettings::new(z, z, z, z).unwrap();
        let op = chsh_operator(&same, &gens).unwrap();
        assert_eq!(op.get(&[3, 3]), 2.0);
        let mixed = decompose(&ComplexMatrix::identity(4).scale_real(0.25), 2, 2, TensorKind::State).unwrap();
        assert_eq!(
            bloch_expectation(&mixed, &chsh_operator(&ChshSettings::textbook(), &gens).unwrap()).unwrap(),
            0.0
        );
        assert!(ChshSettings::new([1.0, 1.0, 0.0], z, z, z).is_err());
        assert!(chsh_operator(&same, &build_generators(3).unwrap()).is_err());
    }

    #[test]
    fn planar_refinement_reaches_tsirelson_for_phi_plus() {
        let e = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        let (_, v) = refine_planar_settings(&e);
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}
