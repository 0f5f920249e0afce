use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::words::WordBasis;
use crate::hull::HullError;
use crate::scalar::Scalar;

/// Element of the tensor algebra over `ℝ^{d+1}` truncated at weight `m`, stored
/// densely in [`WordBasis`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensor<T> {
    basis: Arc<WordBasis>,
    coeffs: Vec<T>,
}

impl<T: Scalar + Serialize> Serialize for TruncatedTensor<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.coeffs.len()))?;
        for (w, c) in self.basis.words().iter().zip(&self.coeffs) {
            map.serialize_entry(&w.to_string(), c)?;
        }
        map.end()
    }
}

fn inv_factorials<T: Scalar>(n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = 1.0f64;
    out.push(T::one());
    for k in 1..=n {
        f *= k as f64;
        out.push(T::from_f64_lossy(1.0 / f));
    }
    out
}

impl<T: Scalar> TruncatedTensor<T> {
    pub fn zero(basis: Arc<WordBasis>) -> Self {
        let coeffs = vec![T::zero(); basis.len()];
        TruncatedTensor { basis, coeffs }
    }

    /// Unit of the algebra: 1 on the empty word.
    pub fn identity(basis: Arc<WordBasis>) -> Self {
        let mut t = Self::zero(basis);
        t.coeffs[0] = T::one();
        t
    }

    pub fn from_coeffs(basis: Arc<WordBasis>, coeffs: Vec<T>) -> Result<Self, HullError> {
        if coeffs.len() != basis.len() {
            return Err(HullError::DimensionMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(HullError::NonFinite("tensor coefficients"));
        }
        Ok(TruncatedTensor { basis, coeffs })
    }

    pub fn basis(&self) -> &Arc<WordBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of a word, `None` if it is above the truncation weight.
    pub fn get(&self, letters: &[u8]) -> Option<T> {
        self.basis.index_of(letters).map(|i| self.coeffs[i])
    }

    /// Coefficients of the non-empty words.
    pub fn features(&self) -> &[T] {
        &self.coeffs[1..]
    }

    fn check_increment(&self, inc: &[T]) -> Result<(), HullError> {
        if inc.len() != self.basis.d() + 1 {
            return Err(HullError::DimensionMismatch {
                expected: self.basis.d() + 1,
                found: inc.len(),
            });
        }
        if inc.iter().any(|x| !x.is_finite()) {
            return Err(HullError::NonFinite("increment"));
        }
        Ok(())
    }

    /// Signature of the straight segment with the given increment:
    /// `Π inc[α_j] / k!` on a word of length `k`.
    pub fn segment_exp(basis: Arc<WordBasis>, inc: &[T]) -> Result<Self, HullError> {
        let mut t = Self::identity(basis);
        t.check_increment(inc)?;
        let inv_fact = inv_factorials::<T>(t.basis.max_weight());
        for i in 1..t.basis.len() {
            let w = &t.basis.word(i).letters;
            let prod = w.iter().fold(T::one(), |acc, &l| acc * inc[l as usize]);
            t.coeffs[i] = prod * inv_fact[w.len()];
        }
        Ok(t)
    }

    /// Truncated product `(a ⊗ b)(w) = Σ_{w = uv} a(u) b(v)`.
    pub fn chen_product(&self, other: &Self) -> Result<Self, HullError> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && self.basis != other.basis {
            return Err(HullError::InvalidArgument("tensors over different word bases".into()));
        }
        let basis = &self.basis;
        let coeffs = (0..basis.len())
            .map(|i| {
                basis
                    .prefixes(i)
                    .iter()
                    .zip(basis.suffixes(i))
                    .map(|(&u, &v)| self.coeffs[u] * other.coeffs[v])
                    .sum()
            })
            .collect();
        Ok(TruncatedTensor {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    /// In place `self ← self ⊗ segment_exp(inc)` in `O(D·m)`.
    pub fn extend_by_segment(&mut self, inc: &[T]) -> Result<(), HullError> {
        self.check_increment(inc)?;
        let inv_fact = inv_factorials::<T>(self.basis.max_weight());
        // A proper prefix has smaller weight, so it sits earlier in the basis
        // and is still unmodified when visited in reverse.
        for i in (1..self.basis.len()).rev() {
            let w = &self.basis.word(i).letters;
            let pre = self.basis.prefixes(i);
            let k = w.len();
            let mut acc = self.coeffs[i];
            let mut prod = T::one();
            for j in (0..k).rev() {
                prod = prod * inc[w[j] as usize];
                acc = acc + self.coeffs[pre[j]] * prod * inv_fact[k - j];
            }
            self.coeffs[i] = acc;
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &Self, scale: T) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + scale * *b;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    /// `exp(x) = Σ_n x^{⊗n} / n!` for `x` with zero empty-word coefficient.
    pub fn exp(&self) -> Result<Self, HullError> {
        if self.coeffs[0] != T::zero() {
            return Err(HullError::InvalidArgument(
                "tensor exponential needs a zero constant term".into(),
            ));
        }
        let mut out = Self::identity(self.basis.clone());
        let mut power = Self::identity(self.basis.clone());
        // Every non-empty word has weight ≥ 1.
        for n in 1..=self.basis.max_weight() {
            power = power.chen_product(self)?;
            let scale = T::from_f64_lossy(1.0 / (1..=n).map(|k| k as f64).product::<f64>());
            out.add_scaled(&power, scale);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, m: usize) -> Arc<WordBasis> {
        Arc::new(WordBasis::new(d, m))
    }

    #[test]
    fn segment_coefficients() {
        let b = basis(2, 4);
        let v = [0.3f64, -1.2, 0.7];
        let t = TruncatedTensor::segment_exp(b.clone(), &v).unwrap();
        assert_eq!(t.get(&[]).unwrap(), 1.0);
        assert!((t.get(&[1, 2]).unwrap() - v[1] * v[2] / 2.0).abs() < 1e-15);
        assert!((t.get(&[2, 1, 1]).unwrap() - v[2] * v[1] * v[1] / 6.0).abs() < 1e-15);
        let t = TruncatedTensor::segment_exp(basis(1, 3), &[1.0, 1.0]).unwrap();
        assert_eq!(t.get(&[0, 1]).unwrap(), 0.5);
        let z = TruncatedTensor::segment_exp(b.clone(), &[0.0; 3]).unwrap();
        assert_eq!(z, TruncatedTensor::identity(b));
    }

    #[test]
    fn identity_is_neutral() {
        let b = basis(2, 3);
        let x = TruncatedTensor::segment_exp(b.clone(), &[0.1, 0.4, -0.2]).unwrap();
        let id = TruncatedTensor::identity(b);
        assert_eq!(id.chen_product(&x).unwrap(), x);
        assert_eq!(x.chen_product(&id).unwrap(), x);
    }

    #[test]
    fn halves_of_a_line() {
        let b = basis(2, 5);
        let v = [0.5, 0.8, -0.3];
        let half: Vec<f64> = v.iter().map(|x| x / 2.0).collect();
        let h = TruncatedTensor::segment_exp(b.clone(), &half).unwrap();
        let joined = h.chen_product(&h).unwrap();
        let whole = TruncatedTensor::segment_exp(b, &v).unwrap();
        assert!(joined.max_abs_diff(&whole) < 1e-14);
        let a = TruncatedTensor::<f64>::segment_exp(basis(1, 2), &[0.0, 0.2]).unwrap();
        let c = TruncatedTensor::segment_exp(basis(1, 2), &[0.0, 0.5]).unwrap();
        let p = a.chen_product(&c).unwrap();
        assert!((p.get(&[1]).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn in_place_extension_matches_product() {
        let b = basis(3, 4);
        let a = TruncatedTensor::segment_exp(b.clone(), &[0.1, 0.3, -0.4, 0.9]).unwrap();
        let c = TruncatedTensor::segment_exp(b.clone(), &[0.2, -0.5, 0.6, 0.1]).unwrap();
        let mut x = a.chen_product(&c).unwrap();
        let inc = [0.05, 1.1, -0.7, 0.2];
        let expected = x
            .chen_product(&TruncatedTensor::segment_exp(b, &inc).unwrap())
            .unwrap();
        x.extend_by_segment(&inc).unwrap();
        assert!(x.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn exp_of_a_letter_is_a_segment() {
        let b = basis(2, 4);
        let mut g = TruncatedTensor::zero(b.clone());
        let v = [0.4, -0.3, 1.5];
        for l in 0..3u8 {
            let i = b.index_of(&[l]).unwrap();
            g.coeffs[i] = v[l as usize];
        }
        let e = g.exp().unwrap();
        let s = TruncatedTensor::segment_exp(b, &v).unwrap();
        assert!(e.max_abs_diff(&s) < 1e-14);
    }

    #[test]
    fn single_precision() {
        let b = basis(1, 3);
        let t = TruncatedTensor::<f32>::segment_exp(b, &[1.0, 2.0]).unwrap();
        assert_eq!(t.get(&[1, 1]).unwrap(), 2.0);
    }

    #[test]
    fn mismatched_increment() {
        assert!(TruncatedTensor::<f64>::segment_exp(basis(2, 2), &[1.0]).is_err());
    }
}
