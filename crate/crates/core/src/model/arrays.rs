//! Dense index containers for (period, day, hour[, contingency]) data.

use serde::{Deserialize, Serialize};

/// Dimensions of the planning index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub c: usize,
}

impl Dims {
    pub fn hours(&self) -> usize {
        self.n * self.j * self.k * self.c
    }
}

/// Row-major `[n][j][k]` container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series3<T> {
    n: usize,
    j: usize,
    k: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Series3<T> {
    pub fn zeros(n: usize, j: usize, k: usize) -> Self {
        Self {
            n,
            j,
            k,
            data: vec![T::default(); n * j * k],
        }
    }

    pub fn from_fn(n: usize, j: usize, k: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * j * k);
        for a in 0..n {
            for b in 0..j {
                for d in 0..k {
                    data.push(f(a, b, d));
                }
            }
        }
        Self { n, j, k, data }
    }

    #[inline]
    fn idx(&self, n: usize, j: usize, k: usize) -> usize {
        debug_assert!(n < self.n && j < self.j && k < self.k);
        (n * self.j + j) * self.k + k
    }

    #[inline]
    pub fn at(&self, n: usize, j: usize, k: usize) -> T {
        self.data[self.idx(n, j, k)]
    }

    pub fn set(&mut self, n: usize, j: usize, k: usize, v: T) {
        let i = self.idx(n, j, k);
        self.data[i] = v;
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.j, self.k)
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }
}

/// Row-major `[n][j][k][c]` container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series4<T> {
    n: usize,
    j: usize,
    k: usize,
    c: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Series4<T> {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            n: dims.n,
            j: dims.j,
            k: dims.k,
            c: dims.c,
            data: vec![T::default(); dims.hours()],
        }
    }

    #[inline]
    fn idx(&self, n: usize, j: usize, k: usize, c: usize) -> usize {
        debug_assert!(n < self.n && j < self.j && k < self.k && c < self.c);
        ((n * self.j + j) * self.k + k) * self.c + c
    }

    #[inline]
    pub fn at(&self, n: usize, j: usize, k: usize, c: usize) -> T {
        self.data[self.idx(n, j, k, c)]
    }

    pub fn set(&mut self, n: usize, j: usize, k: usize, c: usize, v: T) {
        let i = self.idx(n, j, k, c);
        self.data[i] = v;
    }

    pub fn dims(&self) -> Dims {
        Dims {
            n: self.n,
            j: self.j,
            k: self.k,
            c: self.c,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series3_layout() {
        let s = Series3::from_fn(2, 3, 4, |n, j, k| (n * 100 + j * 10 + k) as i64);
        assert_eq!(s.at(1, 2, 3), 123);
        assert_eq!(s.at(0, 0, 0), 0);
        assert_eq!(s.shape(), (2, 3, 4));
    }

    #[test]
    fn series4_set_get() {
        let mut s = Series4::<f64>::zeros(Dims { n: 1, j: 2, k: 3, c: 2 });
        s.set(0, 1, 2, 1, 7.5);
        assert_eq!(s.at(0, 1, 2, 1), 7.5);
        assert_eq!(s.at(0, 1, 2, 0), 0.0);
    }
}
