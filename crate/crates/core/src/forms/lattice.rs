use super::{FormValue, FormsError};

/// A regular material grid in 1 to 4 dimensions, stored row-major with the
/// last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    strides: Vec<usize>,
}

impl Lattice {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self, FormsError> {
        let p = shape.len();
        if !(1..=4).contains(&p) {
            return Err(FormsError::InvalidLattice(format!("dimension {p} outside 1..=4")));
        }
        if spacing.len() != p || origin.len() != p {
            return Err(FormsError::InvalidLattice("shape, spacing and origin lengths differ".into()));
        }
        if let Some(n) = shape.iter().find(|&&n| n < 3) {
            return Err(FormsError::InvalidLattice(format!("axis with {n} points; at least 3 needed")));
        }
        if spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) || origin.iter().any(|o| !o.is_finite()) {
            return Err(FormsError::InvalidLattice("spacing must be positive and finite".into()));
        }
        let mut strides = vec![1; p];
        for a in (0..p - 1).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        Ok(Lattice { shape, spacing, origin, strides })
    }

    /// `n^p` points covering the unit cube.
    pub fn unit_cube(p: usize, n: usize) -> Result<Self, FormsError> {
        let h = 1.0 / (n.max(2) - 1) as f64;
        Lattice::new(vec![n; p], vec![h; p], vec![0.0; p])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in 0..self.dim() {
            out[a] = idx / self.strides[a];
            idx %= self.strides[a];
        }
        out
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.multi_index(idx).iter().zip(&self.shape).all(|(&i, &n)| i > 0 && i + 1 < n)
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_interior(i))
    }

    /// Second-order derivative along `axis` of values stored one per point:
    /// central in the interior, one-sided three-point at the two ends.
    pub fn partial<V: FormValue>(&self, values: &[V], axis: usize) -> Vec<V> {
        assert_eq!(values.len(), self.len(), "one value per lattice point");
        let n = self.shape[axis];
        let stride = self.strides[axis];
        let inv = 1.0 / (2.0 * self.spacing[axis]);
        (0..self.len())
            .map(|idx| {
                let i = (idx / stride) % n;
                let mut out = V::zero();
                if i == 0 {
                    out.add_scaled(&values[idx], -3.0 * inv);
                    out.add_scaled(&values[idx + stride], 4.0 * inv);
                    out.add_scaled(&values[idx + 2 * stride], -inv);
                } else if i == n - 1 {
                    out.add_scaled(&values[idx], 3.0 * inv);
                    out.add_scaled(&values[idx - stride], -4.0 * inv);
                    out.add_scaled(&values[idx - 2 * stride], inv);
                } else {
                    out.add_scaled(&values[idx + stride], inv);
                    out.add_scaled(&values[idx - stride], -inv);
                }
                out
            })
            .collect()
    }

    /// Trapezoidal weight of each point.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                self.multi_index(idx)
                    .iter()
                    .enumerate()
                    .map(|(a, &i)| {
                        let edge = i == 0 || i + 1 == self.shape[a];
                        self.spacing[a] * if edge { 0.5 } else { 1.0 }
                    })
                    .product()
            })
            .collect()
    }

    /// Signed boundary integral `sum_a (int_{rho^a = max} f_a - int_{rho^a = min} f_a)`,
    /// with `flux[idx][a]` the a-th flux component at a point, trapezoidal on each face.
    pub fn boundary_flux(&self, flux: &[Vec<f64>]) -> f64 {
        let p = self.dim();
        let mut total = 0.0;
        for idx in 0..self.len() {
            let mi = self.multi_index(idx);
            for a in 0..p {
                let sign = if mi[a] + 1 == self.shape[a] {
                    1.0
                } else if mi[a] == 0 {
                    -1.0
                } else {
                    continue;
                };
                let mut w = 1.0;
                for b in (0..p).filter(|&b| b != a) {
                    let edge = mi[b] == 0 || mi[b] + 1 == self.shape[b];
                    w *= self.spacing[b] * if edge { 0.5 } else { 1.0 };
                }
                total += sign * w * flux[idx][a];
            }
        }
        total
    }
}

/// Strictly increasing multi-indices of length `k` from `0..p`, in lexicographic order.
pub fn multi_indices(p: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p {
            cur.push(i);
            rec(i + 1, p, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= p {
        rec(0, p, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(Lattice::new(vec![2, 5], vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Lattice::new(vec![3; 5], vec![1.0; 5], vec![0.0; 5]).is_err());
        assert!(Lattice::new(vec![4], vec![-1.0], vec![0.0]).is_err());
    }

    #[test]
    fn row_major_last_axis_fastest() {
        let l = Lattice::new(vec![3, 4], vec![0.5, 0.25], vec![1.0, 0.0]).unwrap();
        assert_eq!(l.multi_index(5), vec![1, 1]);
        assert_eq!(l.coords(5), vec![1.5, 0.25]);
        assert_eq!(l.interior_indices().count(), 2);
    }

    #[test]
    fn component_counts_are_binomial() {
        assert_eq!(multi_indices(4, 2).len(), 6);
        assert_eq!(multi_indices(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(multi_indices(2, 3).len(), 0);
    }

    #[test]
    fn quadratics_are_differentiated_exactly_everywhere() {
        let l = Lattice::new(vec![5], vec![0.3], vec![-0.2]).unwrap();
        let f: Vec<f64> = (0..5).map(|i| l.coords(i)[0].powi(2) * 3.0 - 1.0).collect();
        let df = l.partial(&f, 0);
        for (i, d) in df.iter().enumerate() {
            assert!((d - 6.0 * l.coords(i)[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn trapezoid_integrates_linear_functions_exactly() {
        let l = Lattice::unit_cube(2, 5).unwrap();
        let w = l.quadrature_weights();
        let s: f64 = (0..l.len()).map(|i| w[i] * (1.0 + l.coords(i)[0] + 2.0 * l.coords(i)[1])).sum();
        assert!((s - 2.5).abs() < 1e-14);
    }
}
