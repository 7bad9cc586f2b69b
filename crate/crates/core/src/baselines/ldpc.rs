//! Quasi-cyclic LDPC coding with sum-product belief propagation.
//!
//! The shipped code is the IEEE 802.11n rate-3/4 code with 648-bit
//! codewords (lifting size 27). Codewords are systematic: the first `k` bits
//! carry the message, the remaining `n - k` are parity.

use crate::{Error, Result};

const Z_648: usize = 27;

/// Base matrix of the 802.11n (648, 486) code; `-1` marks an all-zero block,
/// `s >= 0` the identity cyclically shifted by `s`.
#[rustfmt::skip]
const BASE_648_R34: [[i32; 24]; 6] = [
    [16, 17, 22, 24,  9,  3, 14, -1,  4,  2,  7, -1, 26, -1,  2, -1, 21, -1,  1,  0, -1, -1, -1, -1],
    [25, 12, 12,  3,  3, 26,  6, 21, -1, 15, 22, -1, 15, -1,  4, -1, -1, 16, -1,  0,  0, -1, -1, -1],
    [25, 18, 26, 16, 22, 23,  9, -1,  0, -1,  4, -1,  4, -1,  8, 23, 11, -1, -1, -1,  0,  0, -1, -1],
    [ 9,  7,  0,  1, 17, -1, -1,  7,  3, -1,  3, 23, -1, 16, -1, -1, 21, -1,  0, -1, -1,  0,  0, -1],
    [24,  5, 26,  7,  1, -1, -1, 15, 24, 15, -1,  8, -1, 13, -1, 13, -1, 11, -1, -1, -1, -1,  0,  0],
    [ 2,  2, 19, 14, 24,  1, 15, 19, -1, 21, -1,  2, -1, 24, -1,  3, -1,  2,  1, -1, -1, -1, -1,  0],
];

#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    /// Variable indices attached to each check.
    checks: Vec<Vec<usize>>,
    /// Row `i` gives parity bit `i` as a GF(2) combination of message bits.
    parity_rows: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Message bits (first `k` codeword bits after hard decision).
    pub message: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn get_bit(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

fn flip_bit(row: &mut [u64], i: usize) {
    row[i / 64] ^= 1 << (i % 64);
}

impl LdpcCode {
    pub fn ieee80211n_648_r34() -> Self {
        let base: Vec<Vec<i32>> = BASE_648_R34.iter().map(|r| r.to_vec()).collect();
        Self::from_base_matrix(&base, Z_648, 18).expect("the 802.11n parity part is invertible")
    }

    /// Expands a base matrix whose first `systematic_cols` block columns carry
    /// the message.
    pub fn from_base_matrix(base: &[Vec<i32>], z: usize, systematic_cols: usize) -> Result<Self> {
        let rows = base.len();
        let cols = base.first().map(|r| r.len()).unwrap_or(0);
        if rows == 0 || cols <= systematic_cols || base.iter().any(|r| r.len() != cols) {
            return Err(Error::shape("malformed LDPC base matrix"));
        }
        let n = cols * z;
        let k = systematic_cols * z;
        let m = n - k;
        if m != rows * z {
            return Err(Error::shape("parity part of the base matrix must be square"));
        }
        let mut checks = vec![Vec::new(); m];
        for (br, row) in base.iter().enumerate() {
            for (bc, &shift) in row.iter().enumerate() {
                if shift < 0 {
                    continue;
                }
                for i in 0..z {
                    checks[br * z + i].push(bc * z + (i + shift as usize) % z);
                }
            }
        }
        for c in &mut checks {
            c.sort_unstable();
        }

        // Dense [Hp | Hs] rows; Gauss-Jordan on Hp turns the right half into Hp⁻¹ Hs.
        let wp = words(m);
        let ws = words(k);
        let mut hp: Vec<Vec<u64>> = vec![vec![0; wp]; m];
        let mut hs: Vec<Vec<u64>> = vec![vec![0; ws]; m];
        for (r, vars) in checks.iter().enumerate() {
            for &v in vars {
                if v < k {
                    flip_bit(&mut hs[r], v);
                } else {
                    flip_bit(&mut hp[r], v - k);
                }
            }
        }
        for col in 0..m {
            let pivot = (col..m)
                .find(|&r| get_bit(&hp[r], col))
                .ok_or_else(|| Error::shape("parity part of the LDPC matrix is singular"))?;
            hp.swap(col, pivot);
            hs.swap(col, pivot);
            for r in 0..m {
                if r != col && get_bit(&hp[r], col) {
                    let (src_p, src_s) = (hp[col].clone(), hs[col].clone());
                    for (d, s) in hp[r].iter_mut().zip(&src_p) {
                        *d ^= s;
                    }
                    for (d, s) in hs[r].iter_mut().zip(&src_s) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(Self {
            n,
            k,
            checks,
            parity_rows: hs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::shape(format!(
                "LDPC message must have {} bits, got {}",
                self.k,
                message.len()
            )));
        }
        let mut packed = vec![0u64; words(self.k)];
        for (i, &b) in message.iter().enumerate() {
            if b & 1 == 1 {
                flip_bit(&mut packed, i);
            }
        }
        let mut codeword = message.iter().map(|b| b & 1).collect::<Vec<u8>>();
        codeword.extend(self.parity_rows.iter().map(|row| {
            let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            (ones & 1) as u8
        }));
        Ok(codeword)
    }

    pub fn syndrome_ok(&self, codeword: &[u8]) -> bool {
        self.checks
            .iter()
            .all(|vars| vars.iter().fold(0u8, |acc, &v| acc ^ codeword[v]) == 0)
    }

    /// Sum-product decoding. `llr[i] > 0` favours bit `i` = 0.
    pub fn decode(&self, llr: &[f64], max_iterations: usize) -> Result<DecodeResult> {
        if llr.len() != self.n {
            return Err(Error::shape(format!(
                "LDPC decoder expects {} LLRs, got {}",
                self.n,
                llr.len()
            )));
        }
        const CLAMP: f64 = 50.0;
        let edges = self.edge_count();
        let mut check_to_var = vec![0.0f64; edges];
        let mut var_to_check = vec![0.0f64; edges];
        let mut hard: Vec<u8> = llr.iter().map(|&l| u8::from(l < 0.0)).collect();
        if self.syndrome_ok(&hard) {
            return Ok(DecodeResult {
                message: hard[..self.k].to_vec(),
                converged: true,
                iterations: 0,
            });
        }
        let mut total = llr.to_vec();
        let mut tanh_buf = Vec::new();
        for iter in 1..=max_iterations {
            // variable -> check
            let mut e = 0;
            for vars in &self.checks {
                for &v in vars {
                    var_to_check[e] = (total[v] - check_to_var[e]).clamp(-CLAMP, CLAMP);
                    e += 1;
                }
            }
            // check -> variable, leave-one-out products via prefix/suffix
            let mut e = 0;
            for vars in &self.checks {
                let deg = vars.len();
                tanh_buf.clear();
                tanh_buf.extend(var_to_check[e..e + deg].iter().map(|&q| (q / 2.0).tanh()));
                let mut prefix = 1.0;
                let mut suffix = vec![1.0; deg + 1];
                for j in (0..deg).rev() {
                    suffix[j] = suffix[j + 1] * tanh_buf[j];
                }
                for j in 0..deg {
                    let p = (prefix * suffix[j + 1]).clamp(-0.999_999_999_999, 0.999_999_999_999);
                    check_to_var[e + j] = (2.0 * p.atanh()).clamp(-CLAMP, CLAMP);
                    prefix *= tanh_buf[j];
                }
                e += deg;
            }
            // totals and hard decision
            total.copy_from_slice(llr);
            let mut e = 0;
            for vars in &self.checks {
                for &v in vars {
                    total[v] += check_to_var[e];
                    e += 1;
                }
            }
            for (h, &t) in hard.iter_mut().zip(&total) {
                *h = u8::from(t < 0.0);
            }
            if self.syndrome_ok(&hard) {
                return Ok(DecodeResult {
                    message: hard[..self.k].to_vec(),
                    converged: true,
                    iterations: iter,
                });
            }
        }
        Ok(DecodeResult {
            message: hard[..self.k].to_vec(),
            converged: false,
            iterations: max_iterations,
        })
    }
}
