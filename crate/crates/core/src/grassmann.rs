//! Plücker coordinates of the span `Φ(a, w)`, the incidence test for the
//! universal family, and the local-frame determinant identity.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::family::{reduced_jet_derivative, FamilySpec, MultiIndex};
use crate::jet::{evaluate, jet_derivative, jet_of_curve, CurveGerm, JetPoint};
use crate::matrix::{combinations, Matrix};
use crate::poly::Polynomial;
use crate::rational::{pow, Rational};

/// Plücker coordinates of a `(k+1)`-plane, keyed by increasing column tuples.
/// Only nonzero coordinates are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerVector {
    labels: Vec<String>,
    size: usize,
    coords: BTreeMap<Vec<usize>, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PluckerImage {
    Point(PluckerVector),
    /// Every maximal minor vanishes: the rows are linearly dependent.
    Degenerate,
}

impl PluckerImage {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, PluckerImage::Degenerate)
    }

    pub fn point(&self) -> Option<&PluckerVector> {
        match self {
            PluckerImage::Point(p) => Some(p),
            PluckerImage::Degenerate => None,
        }
    }
}

impl PluckerVector {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coords(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.coords
    }

    /// Coordinate for an increasing tuple (zero if not stored).
    pub fn coord(&self, tuple: &[usize]) -> Rational {
        self.coords.get(tuple).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coordinate for an arbitrary tuple, extended antisymmetrically.
    pub fn coord_signed(&self, tuple: &[usize]) -> Rational {
        let mut sorted = tuple.to_vec();
        let mut odd = false;
        // Insertion sort, counting transpositions.
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Rational::zero();
        }
        let v = self.coord(&sorted);
        if odd {
            -v
        } else {
            v
        }
    }

    /// Scaled so that the first nonzero coordinate (lexicographic tuple
    /// order) equals 1.
    pub fn normalized(&self) -> PluckerVector {
        let lead = self.coords.values().next().cloned().unwrap_or_else(Rational::one);
        let inv = lead.recip();
        PluckerVector {
            labels: self.labels.clone(),
            size: self.size,
            coords: self.coords.iter().map(|(t, v)| (t.clone(), v * &inv)).collect(),
        }
    }

    /// Equality as points of projective space.
    pub fn projectively_equal(&self, other: &PluckerVector) -> bool {
        self.size == other.size
            && self.labels.len() == other.labels.len()
            && self.normalized().coords == other.normalized().coords
    }

    /// Every quadratic Plücker relation
    /// `Σ_l (-1)^l p(A ∪ b_l) p(B \ b_l) = 0` for `|A| = size-1`,
    /// `|B| = size+1`, checked by brute force.
    pub fn relations_hold(&self) -> bool {
        self.first_violated_relation().is_none()
    }

    pub fn first_violated_relation(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let ncols = self.labels.len();
        let size = self.size;
        if size == 0 || size + 1 > ncols {
            return None;
        }
        for a in combinations(ncols, size - 1) {
            for b in combinations(ncols, size + 1) {
                let mut total = Rational::zero();
                for l in 0..b.len() {
                    let mut left = a.clone();
                    left.push(b[l]);
                    let right: Vec<usize> =
                        b.iter().enumerate().filter(|&(i, _)| i != l).map(|(_, &c)| c).collect();
                    let term = self.coord_signed(&left) * self.coord_signed(&right);
                    if l % 2 == 0 {
                        total += term;
                    } else {
                        total -= term;
                    }
                }
                if !total.is_zero() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `{"(I_j0,…,I_jk)": "p/q", …}` over the nonzero coordinates.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (tuple, v) in &self.coords {
            let key: Vec<&str> = tuple.iter().map(|&c| self.labels[c].as_str()).collect();
            map.insert(format!("({})", key.join(",")), Value::String(v.to_string()));
        }
        Value::Object(map)
    }
}

/// All maximal minors of a `(k+1) × m` matrix.
pub fn plucker_of(matrix: &Matrix<Rational>, labels: &[String]) -> Result<PluckerImage> {
    plucker_of_with(matrix, labels, ExecMode::default())
}

pub fn plucker_of_with(matrix: &Matrix<Rational>, labels: &[String], mode: ExecMode) -> Result<PluckerImage> {
    let size = matrix.rows();
    if labels.len() != matrix.cols() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} columns",
            labels.len(),
            matrix.cols()
        )));
    }
    if size == 0 || size > matrix.cols() {
        return Ok(PluckerImage::Degenerate);
    }
    let tuples = combinations(matrix.cols(), size);
    let minors = exec::map(mode, &tuples, |tuple| matrix.select_columns(tuple).determinant())
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let coords: BTreeMap<Vec<usize>, Rational> = tuples
        .into_iter()
        .zip(minors)
        .filter(|(_, v)| !v.is_zero())
        .collect();
    if coords.is_empty() {
        return Ok(PluckerImage::Degenerate);
    }
    Ok(PluckerImage::Point(PluckerVector {
        labels: labels.to_vec(),
        size,
        coords,
    }))
}

/// Plain column labels `0, 1, …`.
pub fn index_labels(cols: usize) -> Vec<String> {
    (0..cols).map(|c| c.to_string()).collect()
}

pub fn multi_index_labels(indices: &[MultiIndex]) -> Vec<String> {
    indices.iter().map(MultiIndex::to_string).collect()
}

/// `(k+1) × #𝕀` matrix with entry `(p, I) = d^[p]_I(a_I)(w)`.
pub fn phi_matrix(spec: &FamilySpec, w: &JetPoint) -> Result<Matrix<Rational>> {
    if spec.context() != w.context() {
        return Err(Error::ContextMismatch("family and jet point contexts differ".into()));
    }
    let indices = spec.index_set()?;
    let k = spec.context().k();
    let mut columns = Vec::with_capacity(indices.len());
    for index in &indices {
        let mut col = Vec::with_capacity(k + 1);
        for p in 0..=k {
            if spec.coefficients().contains_key(index) {
                col.push(evaluate(&reduced_jet_derivative(spec, index, p)?, w)?);
            } else {
                col.push(Rational::zero());
            }
        }
        columns.push(col);
    }
    Ok(Matrix::from_fn(k + 1, indices.len(), |p, c| columns[c][p].clone()))
}

/// Whether the degree-δ forms with coefficient rows `Φ(a, [γ]_k)` all vanish
/// at `[T] = [τ_0^r(x) : … : τ_N^r(x)]`, `x = γ(0)`.
pub fn incidence_check(spec: &FamilySpec, gamma: &CurveGerm) -> Result<bool> {
    Ok(incidence_residuals(spec, gamma)?.iter().all(Zero::is_zero))
}

/// `Σ_I Φ[p, I] · T^I` for each `p = 0..=k`.
pub fn incidence_residuals(spec: &FamilySpec, gamma: &CurveGerm) -> Result<Vec<Rational>> {
    let w = jet_of_curve(gamma);
    let matrix = phi_matrix(spec, &w)?;
    let x = gamma.base_point();
    let indices = spec.index_set()?;
    let t_values: Vec<Rational> = indices
        .iter()
        .map(|index| spec.tau_power(index, spec.r()).evaluate(&x))
        .collect();
    Ok((0..matrix.rows())
        .map(|p| {
            (0..matrix.cols())
                .map(|c| matrix.get(p, c) * &t_values[c])
                .sum()
        })
        .collect())
}

/// Numeric Wronskian matrix `(d^[p] f_j (w))`.
fn evaluated_wronskian_matrix(fs: &[Polynomial], w: &JetPoint) -> Result<Matrix<Rational>> {
    let ctx = w.context();
    let k = ctx.k();
    let mut columns = Vec::with_capacity(fs.len());
    for f in fs {
        let lifted = ctx.lift(f)?;
        let col = (0..=k)
            .map(|p| evaluate(&jet_derivative(&lifted, p)?, w))
            .collect::<Result<Vec<_>>>()?;
        columns.push(col);
    }
    Ok(Matrix::from_fn(k + 1, fs.len(), |p, j| columns[j][p].clone()))
}

/// The frame `b_j = s · b̃_j` with its evaluated Wronskian matrix, used to
/// express `ℓ^p_I` by Cramer's rule.
pub struct LocalFrame<'a> {
    spec: &'a FamilySpec,
    point: &'a JetPoint,
    frame_matrix: Matrix<Rational>,
    frame_det: Rational,
}

impl<'a> LocalFrame<'a> {
    pub fn new(spec: &'a FamilySpec, frame: &[Polynomial], s: &Polynomial, w: &'a JetPoint) -> Result<Self> {
        let k = spec.context().k();
        if frame.len() != k + 1 {
            return Err(Error::InvalidInput(format!(
                "a frame has {} elements, got {}",
                k + 1,
                frame.len()
            )));
        }
        if spec.context() != w.context() {
            return Err(Error::ContextMismatch("family and jet point contexts differ".into()));
        }
        let b: Vec<Polynomial> = frame.iter().map(|bt| s * bt).collect();
        let frame_matrix = evaluated_wronskian_matrix(&b, w)?;
        let frame_det = frame_matrix.determinant()?;
        if frame_det.is_zero() {
            return Err(Error::FrameDegenerate);
        }
        Ok(LocalFrame {
            spec,
            point: w,
            frame_matrix,
            frame_det,
        })
    }

    /// `(ℓ^0_I(a)(w), …, ℓ^k_I(a)(w))`, each a ratio of Wronskians:
    /// `W(b_0,…,b_{p−1}, a τ^{(r+k)I}, b_{p+1},…,b_k) / (τ^{rI} W(b_0,…,b_k))`.
    pub fn ell(&self, index: &MultiIndex, a: &Polynomial) -> Result<Vec<Rational>> {
        let spec = self.spec;
        let x = self.point.base_point();
        let tau_r = spec.tau_power(index, spec.r()).evaluate(&x);
        if tau_r.is_zero() {
            return Err(Error::InvalidInput(format!("tau^(r*{index}) vanishes at the base point")));
        }
        let twisted = a * &spec.tau_power(index, spec.r() + spec.context().k() as u32);
        let column = evaluated_wronskian_matrix(&[twisted], self.point)?;
        let column: Vec<Rational> = (0..column.rows()).map(|p| column.get(p, 0).clone()).collect();
        let denom = &tau_r * &self.frame_det;
        (0..self.frame_matrix.cols())
            .map(|p| Ok(self.frame_matrix.with_column(p, &column).determinant()? / &denom))
            .collect()
    }

    /// Rank of `a ↦ (ℓ^p_I(a)(w))_p` over the span of `basis`.
    pub fn index_rank(&self, index: &MultiIndex, basis: &[Polynomial]) -> Result<usize> {
        let k = self.spec.context().k();
        let cols = basis
            .iter()
            .map(|a| self.ell(index, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(k + 1, basis.len(), |p, j| cols[j][p].clone()).rank())
    }
}

/// Returns `(lhs, rhs)` with `lhs = det(ℓ^p_I(b̃_j)(w))` computed through
/// Cramer's rule and `rhs = τ^{k(k+1)I}(x) / s(x)^{k+1}`.
pub fn local_frame_determinant(
    spec: &FamilySpec,
    index: &MultiIndex,
    frame: &[Polynomial],
    s: &Polynomial,
    w: &JetPoint,
) -> Result<(Rational, Rational)> {
    let local = LocalFrame::new(spec, frame, s, w)?;
    let k = spec.context().k();
    let columns = frame
        .iter()
        .map(|bt| local.ell(index, bt))
        .collect::<Result<Vec<_>>>()?;
    let lhs = Matrix::from_fn(k + 1, k + 1, |p, j| columns[j][p].clone()).determinant()?;
    let x = w.base_point();
    let s_x = s.with_variables(spec.context().base_vars())?.evaluate(&x);
    let tau_x = spec.tau_power(index, (k * (k + 1)) as u32).evaluate(&x);
    let rhs = tau_x / pow(&s_x, k as u32 + 1);
    Ok((lhs, rhs))
}

/// All monomials in `z1..zn` of total degree ≤ `degree`.
pub fn monomial_basis(spec: &FamilySpec, degree: u32) -> Vec<Polynomial> {
    let vars = spec.context().base_vars().clone();
    let n = vars.len();
    let mut out = Vec::new();
    for d in 0..=degree {
        for exps in crate::family::multi_indices(n, d) {
            out.push(Polynomial::monomial(vars.clone(), crate::poly::Monomial(exps.0), Rational::one()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{assemble_f, germ_in_hypersurface};
    use crate::jet::JetContext;
    use crate::parse::parse_polynomial;
    use crate::rational::{frac, rat};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
    }

    fn p(ctx: &JetContext, text: &str) -> Polynomial {
        parse_polynomial(text, ctx.base_vars()).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn two_by_four_relation() {
        let a = m(&[&[1, 2, 0, -3], &[4, -1, 5, 2]]);
        let img = plucker_of(&a, &index_labels(4)).unwrap();
        let pv = img.point().unwrap();
        let c = |t: &[usize]| pv.coord(t);
        let rel = c(&[0, 1]) * c(&[2, 3]) - c(&[0, 2]) * c(&[1, 3]) + c(&[0, 3]) * c(&[1, 2]);
        assert!(rel.is_zero());
        assert!(pv.relations_hold());
    }

    #[test]
    fn degenerate_and_identity_block() {
        let rank_one = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert!(plucker_of(&rank_one, &index_labels(3)).unwrap().is_degenerate());
        let id = m(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let img = plucker_of(&id, &index_labels(4)).unwrap();
        let pv = img.point().unwrap();
        assert_eq!(pv.coords().len(), 1);
        assert_eq!(pv.coord(&[0, 1]), rat(1));
    }

    #[test]
    fn projective_equality_and_json() {
        let a = m(&[&[1, 2, 0], &[0, 1, 1]]);
        let b = m(&[&[2, 4, 0], &[0, 3, 3]]);
        let pa = plucker_of(&a, &index_labels(3)).unwrap();
        let pb = plucker_of(&b, &index_labels(3)).unwrap();
        assert!(pa.point().unwrap().projectively_equal(pb.point().unwrap()));
        let labels = multi_index_labels(&[mi(&[1, 0]), mi(&[0, 1]), mi(&[2, 2])]);
        let pc = plucker_of(&a, &labels).unwrap();
        let json = pc.point().unwrap().to_json();
        assert_eq!(json["((1,0),(0,1))"], "1");
        assert_eq!(json["((1,0),(2,2))"], "1");
        assert_eq!(json["((0,1),(2,2))"], "2");
    }

    #[test]
    fn phi_matrix_examples() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = vec![p(&ctx, "z1"), p(&ctx, "z2")];
        let w = JetPoint::new(&ctx, vec![rat(3), rat(2), rat(-1), rat(5)]).unwrap();
        let zero = FamilySpec::new(&ctx, 1, 1, tau.clone(), BTreeMap::new()).unwrap();
        let mz = phi_matrix(&zero, &w).unwrap();
        assert!((0..2).all(|i| (0..2).all(|j| mz.get(i, j).is_zero())));

        // Single index I = (1,0), a = z2: column (a z1, z1 a' + 2 a z1') at w.
        let one = FamilySpec::new(&ctx, 1, 1, tau, [(mi(&[1, 0]), p(&ctx, "z2"))].into()).unwrap();
        let m1 = phi_matrix(&one, &w).unwrap();
        // z1 = 2, z1' = 3, z2 = 5, z2' = -1 in universe order (z1', z1, z2', z2).
        assert_eq!(*m1.get(0, 0), rat(10));
        assert_eq!(*m1.get(1, 0), rat(2 * -1 + 2 * 5 * 3));
        assert!(m1.get(0, 1).is_zero() && m1.get(1, 1).is_zero());
        assert!(m1.rank() <= 2);
    }

    #[test]
    fn incidence_true_on_hypersurface_false_off_it() {
        let ctx = JetContext::new(2, 1).unwrap();
        let tau = vec![p(&ctx, "z1 + 1"), p(&ctx, "z2 + 2"), p(&ctx, "z1 - z2 + 3")];
        let mut spec = FamilySpec::new(
            &ctx,
            1,
            1,
            tau,
            [
                (mi(&[1, 0, 0]), p(&ctx, "z2")),
                (mi(&[0, 1, 0]), p(&ctx, "z1 + 1")),
                (mi(&[0, 0, 1]), p(&ctx, "2")),
            ]
            .into(),
        )
        .unwrap();
        let x = [rat(0), rat(0)];
        let f0 = assemble_f(&spec).evaluate(&x);
        let fix = spec.tau_power(&mi(&[0, 0, 1]), 2).evaluate(&x);
        spec.set_coefficient(mi(&[0, 0, 1]), Polynomial::constant(ctx.base_vars().clone(), rat(2) - f0 / fix))
            .unwrap();
        let f = assemble_f(&spec);
        let gamma = germ_in_hypersurface(&ctx, &f, &x, &[rat(1), rat(1)], 1).unwrap();
        assert!(incidence_check(&spec, &gamma).unwrap());

        let mut comps = gamma.components().to_vec();
        let top = comps[0].coeff(1) + rat(1);
        comps[0].set_coeff(1, top);
        let perturbed = CurveGerm::new(&ctx, comps).unwrap();
        assert!(!incidence_check(&spec, &perturbed).unwrap());

        let zero = FamilySpec::new(&ctx, 1, 1, spec.tau().to_vec(), BTreeMap::new()).unwrap();
        assert!(incidence_check(&zero, &perturbed).unwrap());
    }

    #[test]
    fn frame_determinant_identity() {
        let ctx = JetContext::new(2, 2).unwrap();
        let spec = FamilySpec::new(
            &ctx,
            1,
            1,
            vec![p(&ctx, "z1 + 2"), p(&ctx, "z2 - 1")],
            BTreeMap::new(),
        )
        .unwrap();
        let frame = vec![p(&ctx, "1"), p(&ctx, "z1"), p(&ctx, "1/2*z1^2 + z2")];
        let s = p(&ctx, "z2^2 + 3");
        let w = JetPoint::new(&ctx, (0..6).map(|i| frac(2 * i as i64 + 1, 3)).collect()).unwrap();
        for index in [mi(&[1, 0]), mi(&[0, 1])] {
            let (lhs, rhs) = local_frame_determinant(&spec, &index, &frame, &s, &w).unwrap();
            assert_eq!(lhs, rhs, "{index}");
            let local = LocalFrame::new(&spec, &frame, &s, &w).unwrap();
            assert_eq!(local.index_rank(&index, &monomial_basis(&spec, 2)).unwrap(), 3);
        }
    }

    #[test]
    fn trivial_frame_configuration() {
        let ctx = JetContext::new(1, 1).unwrap();
        let spec = FamilySpec::new(&ctx, 1, 2, vec![p(&ctx, "1")], BTreeMap::new()).unwrap();
        let w = JetPoint::new(&ctx, vec![rat(1), rat(4)]).unwrap();
        let (lhs, rhs) =
            local_frame_determinant(&spec, &mi(&[1]), &[p(&ctx, "1"), p(&ctx, "z1")], &p(&ctx, "1"), &w).unwrap();
        assert_eq!((lhs, rhs), (rat(1), rat(1)));
    }

    #[test]
    fn repeated_frame_is_degenerate() {
        let ctx = JetContext::new(2, 1).unwrap();
        let spec = FamilySpec::new(&ctx, 1, 1, vec![p(&ctx, "z1"), p(&ctx, "z2")], BTreeMap::new()).unwrap();
        let w = JetPoint::new(&ctx, vec![rat(1), rat(2), rat(3), rat(4)]).unwrap();
        let frame = vec![p(&ctx, "z1 + z2"), p(&ctx, "z1 + z2")];
        assert!(matches!(
            local_frame_determinant(&spec, &mi(&[1, 0]), &frame, &p(&ctx, "1"), &w),
            Err(Error::FrameDegenerate)
        ));
    }
}
