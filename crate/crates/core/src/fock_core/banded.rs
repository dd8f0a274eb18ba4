use super::{CMatrix, C64};

/// Banded operator on the truncated number basis.
///
/// Band `k` stores entries (i, i+k) at index `i`; out-of-range slots are zero.
/// Every generator in this crate is at most quadratic in a, a†, so a handful
/// of bands suffices and products with dense matrices cost O(bands·N²).
#[derive(Clone, Debug, PartialEq)]
pub struct Banded {
    n: usize,
    bands: Vec<(isize, Vec<C64>)>,
}

impl Banded {
    pub fn zeros(n: usize) -> Self {
        Self { n, bands: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn band_mut(&mut self, k: isize) -> &mut Vec<C64> {
        let pos = match self.bands.iter().position(|(o, _)| *o == k) {
            Some(p) => p,
            None => {
                self.bands.push((k, vec![C64::new(0.0, 0.0); self.n]));
                self.bands.len() - 1
            }
        };
        &mut self.bands[pos].1
    }

    fn valid(&self, i: usize, k: isize) -> bool {
        let j = i as isize + k;
        j >= 0 && (j as usize) < self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let k = j as isize - i as isize;
        self.bands
            .iter()
            .find(|(o, _)| *o == k)
            .map_or(C64::new(0.0, 0.0), |(_, d)| d[i])
    }

    /// `u a + v a†`.
    pub fn linear(n: usize, u: C64, v: C64) -> Self {
        let mut b = Self::zeros(n);
        {
            let d = b.band_mut(1);
            for i in 0..n - 1 {
                d[i] = u * ((i + 1) as f64).sqrt();
            }
        }
        {
            let d = b.band_mut(-1);
            for i in 1..n {
                d[i] = v * (i as f64).sqrt();
            }
        }
        b
    }

    /// `e a†a + g a² + h a†²`.
    pub fn quadratic(n: usize, e: f64, g: C64, h: C64) -> Self {
        let mut b = Self::zeros(n);
        {
            let d = b.band_mut(0);
            for (i, z) in d.iter_mut().enumerate() {
                *z = C64::new(e * i as f64, 0.0);
            }
        }
        {
            let d = b.band_mut(2);
            for i in 0..n.saturating_sub(2) {
                d[i] = g * (((i + 1) * (i + 2)) as f64).sqrt();
            }
        }
        {
            let d = b.band_mut(-2);
            for i in 2..n {
                d[i] = h * ((i * (i - 1)) as f64).sqrt();
            }
        }
        b
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            n: self.n,
            bands: self
                .bands
                .iter()
                .map(|(k, d)| (*k, d.iter().map(|z| z * s).collect()))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Banded, s: C64) {
        assert_eq!(self.n, other.n);
        for (k, d) in &other.bands {
            let t = self.band_mut(*k);
            for (x, y) in t.iter_mut().zip(d) {
                *x += y * s;
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for (k, d) in &self.bands {
            let t = out.band_mut(-k);
            for i in 0..self.n {
                if self.valid(i, *k) {
                    t[(i as isize + k) as usize] = d[i].conj();
                }
            }
        }
        out
    }

    /// Matrix product self·other (truncated, as for dense matrices).
    pub fn mul(&self, other: &Banded) -> Self {
        let mut out = Self::zeros(self.n);
        for (k1, d1) in &self.bands {
            for (k2, d2) in &other.bands {
                let k = k1 + k2;
                let mut acc = vec![C64::new(0.0, 0.0); self.n];
                let mut any = false;
                for i in 0..self.n {
                    if self.valid(i, *k1) {
                        let m = (i as isize + k1) as usize;
                        if other.valid(m, *k2) {
                            acc[i] = d1[i] * d2[m];
                            any = true;
                        }
                    }
                }
                if any {
                    let t = out.band_mut(k);
                    for (x, y) in t.iter_mut().zip(&acc) {
                        *x += y;
                    }
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (k, d) in &self.bands {
            for i in 0..self.n {
                if self.valid(i, *k) {
                    m[(i, (i as isize + k) as usize)] += d[i];
                }
            }
        }
        m
    }

    /// out += s · self · rho (column-major dense).
    pub fn left_acc(&self, rho: &CMatrix, s: C64, out: &mut CMatrix) {
        let n = self.n;
        let r = rho.as_slice();
        let o = out.as_mut_slice();
        for (k, d) in &self.bands {
            let lo = if *k < 0 { (-k) as usize } else { 0 };
            let hi = if *k > 0 { n - *k as usize } else { n };
            let coef: Vec<C64> = d.iter().map(|z| z * s).collect();
            for j in 0..n {
                let col = j * n;
                let src = &r[col..col + n];
                let dst = &mut o[col..col + n];
                for i in lo..hi {
                    dst[i] += coef[i] * src[(i as isize + k) as usize];
                }
            }
        }
    }

    /// out += s · rho · self.
    pub fn right_acc(&self, rho: &CMatrix, s: C64, out: &mut CMatrix) {
        let n = self.n;
        let r = rho.as_slice();
        let o = out.as_mut_slice();
        for (k, d) in &self.bands {
            for j in 0..n {
                let m = j as isize - k;
                if m < 0 || m as usize >= n {
                    continue;
                }
                let m = m as usize;
                let c = d[m] * s;
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = &r[m * n..m * n + n];
                let dst = &mut o[j * n..j * n + n];
                for (x, y) in dst.iter_mut().zip(src) {
                    *x += c * y;
                }
            }
        }
    }

    /// out += s · self · v.
    pub fn apply_acc(&self, v: &[C64], s: C64, out: &mut [C64]) {
        let n = self.n;
        for (k, d) in &self.bands {
            let lo = if *k < 0 { (-k) as usize } else { 0 };
            let hi = if *k > 0 { n - *k as usize } else { n };
            for i in lo..hi {
                out[i] += s * d[i] * v[(i as isize + k) as usize];
            }
        }
    }
}
