//! Dense matrices over a prime field, sized for brute-force enumeration.
//!
//! Entries are reduced residues stored as u64. Row-reduction drives both the
//! subspace enumeration (every subspace appears exactly once as a reduced
//! row-echelon basis) and membership tests.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMat {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    data: Vec<u64>,
}

impl FpMat {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        FpMat {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = FpMat::zero(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Self {
        let mut m = FpMat::zero(rows.len(), cols, p);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x % p);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.p;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut m = FpMat::zero(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut m = FpMat::zero(self.rows, rhs.cols, self.p);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = (m.get(i, j) + a * rhs.get(k, j)) % self.p;
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut m = self.clone();
        for x in &mut m.data {
            *x = (*x * c) % m.p;
        }
        m
    }

    pub fn neg(&self) -> Self {
        let mut m = self.clone();
        for x in &mut m.data {
            *x = (m.p - *x) % m.p;
        }
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(&rhs.data) {
            *x = (*x + *y) % m.p;
        }
        m
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn inv_scalar(&self, x: u64) -> u64 {
        mod_inverse(x, self.p)
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            for j in 0..self.cols {
                let tmp = self.get(r, j);
                self.set(r, j, self.get(pr, j));
                self.set(pr, j, tmp);
            }
            let inv = self.inv_scalar(self.get(r, c));
            for j in 0..self.cols {
                self.set(r, j, self.get(r, j) * inv);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let f = self.get(i, c);
                    for j in 0..self.cols {
                        let v = (self.get(i, j) + (self.p - f) * self.get(r, j)) % self.p;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMat::zero(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut inv = FpMat::zero(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel, one solution per row.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let coeff = m.get(r, free);
                v[pc] = (self.p - coeff) % self.p;
            }
            basis.push(v);
        }
        basis
    }

    /// Reduce a vector against RREF rows; returns the residue.
    pub fn reduce_vector(&self, v: &[u64]) -> Vec<u64> {
        let mut v = v.to_vec();
        for i in 0..self.rows {
            let Some(c) = (0..self.cols).find(|&j| self.get(i, j) != 0) else {
                continue;
            };
            if v[c] != 0 {
                let f = v[c] * self.inv_scalar(self.get(i, c)) % self.p;
                for (j, x) in v.iter_mut().enumerate() {
                    *x = (*x + (self.p - f) * self.get(i, j) % self.p) % self.p;
                }
            }
        }
        v
    }

    /// Whether `v` lies in the row space (rows must be in RREF).
    pub fn row_space_contains(&self, v: &[u64]) -> bool {
        self.reduce_vector(v).iter().all(|&x| x == 0)
    }
}

pub fn mod_inverse(x: u64, p: u64) -> u64 {
    mod_pow(x % p, p - 2, p)
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// All subspaces of F_p^n as RREF row-basis matrices, every dimension from 0
/// to n, each subspace exactly once.
pub fn enumerate_subspaces(n: usize, p: u64) -> Vec<FpMat> {
    let mut out = vec![FpMat::zero(0, n, p)];
    for k in 1..=n {
        // choose pivot columns, then fill the free entries
        let mut pivots = (0..k).collect::<Vec<usize>>();
        loop {
            // free positions: in row r, columns after pivots[r] that are not
            // pivot columns themselves
            let mut free_slots = Vec::new();
            for (r, &pc) in pivots.iter().enumerate() {
                for c in pc + 1..n {
                    if !pivots.contains(&c) {
                        free_slots.push((r, c));
                    }
                }
            }
            let total = free_slots.len();
            let mut counter = vec![0u64; total];
            loop {
                let mut m = FpMat::zero(k, n, p);
                for (r, &pc) in pivots.iter().enumerate() {
                    m.set(r, pc, 1);
                }
                for (slot, &(r, c)) in free_slots.iter().enumerate() {
                    m.set(r, c, counter[slot]);
                }
                out.push(m);
                // odometer
                let mut i = 0;
                loop {
                    if i == total {
                        break;
                    }
                    counter[i] += 1;
                    if counter[i] < p {
                        break;
                    }
                    counter[i] = 0;
                    i += 1;
                }
                if total == 0 || i == total {
                    break;
                }
            }
            // next pivot combination
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if pivots[i] + (k - i) < n {
                    pivots[i] += 1;
                    for j in i + 1..k {
                        pivots[j] = pivots[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    pivots.clear();
                    break;
                }
            }
            if pivots.is_empty() {
                break;
            }
        }
    }
    out
}

/// Gaussian binomial count of k-subspaces, for enumeration cross-checks.
pub fn subspace_count(n: usize, p: u64) -> u64 {
    let mut total = 0u64;
    for k in 0..=n {
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..k {
            num *= p.pow((n - i) as u32) - 1;
            den *= p.pow((k - i) as u32) - 1;
        }
        total += num / den;
    }
    total
}
