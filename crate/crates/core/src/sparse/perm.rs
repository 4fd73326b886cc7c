use crate::{Error, Result};

/// A bijection on `0..n`; `forward[old] = new`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let v: Vec<usize> = (0..n).collect();
        Permutation { forward: v.clone(), inverse: v }
    }

    /// From the old-to-new map.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (old, &new) in forward.iter().enumerate() {
            if new >= n {
                return Err(Error::InvalidPermutation(format!("index {new} out of range for n = {n}")));
            }
            if inverse[new] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("index {new} repeated")));
            }
            inverse[new] = old;
        }
        Ok(Permutation { forward, inverse })
    }

    /// From the new-to-old map, i.e. a list of old indices in their new order.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let p = Self::from_forward(order)?;
        Ok(p.inverted())
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// New position of old index `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    /// Old index at new position `i`.
    #[inline]
    pub fn apply_inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn inverted(&self) -> Self {
        Permutation { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// `q ∘ self`: apply `self` first, then `q`.
    pub fn then(&self, q: &Permutation) -> Self {
        assert_eq!(self.len(), q.len(), "permutation size mismatch");
        let forward: Vec<usize> = self.forward.iter().map(|&i| q.forward[i]).collect();
        Permutation::from_forward(forward).expect("composition of bijections")
    }

    /// `y[p(i)] = x[i]`.
    pub fn permute_vec<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.len());
        self.inverse.iter().map(|&old| x[old]).collect()
    }

    /// `y[i] = x[p(i)]`, the inverse of [`Permutation::permute_vec`].
    pub fn unpermute_vec<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.len());
        self.forward.iter().map(|&new| x[new]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_forward(vec![0, 0]).is_err());
        assert!(Permutation::from_forward(vec![0, 2]).is_err());
    }

    #[test]
    fn vec_round_trip() {
        let p = Permutation::from_forward(vec![2, 0, 1]).unwrap();
        let x = [10, 20, 30];
        let y = p.permute_vec(&x);
        assert_eq!(y, vec![20, 30, 10]);
        assert_eq!(p.unpermute_vec(&y), x.to_vec());
        assert_eq!(p.then(&p.inverted()), Permutation::identity(3));
    }
}
