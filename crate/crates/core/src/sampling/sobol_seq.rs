//! Gray-code Sobol sequence generator with an embedded direction-number
//! table (Joe-Kuo style, dimensions 2..=64; dimension 1 is the van der
//! Corput sequence in base 2).

const BITS: u32 = 32;
const TABLE: &str = include_str!("joe_kuo_64.txt");

/// One table row: primitive polynomial degree `s`, interior coefficient bits
/// `a`, and the initial direction numbers `m[0..s]`.
pub(crate) struct DirectionRow {
    pub s: u32,
    pub a: u32,
    pub m: Vec<u64>,
}

pub(crate) fn parse_table() -> Vec<DirectionRow> {
    TABLE
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut it = line.split_whitespace();
            let _dim: usize = it.next().expect("dim").parse().expect("dim");
            let s: u32 = it.next().expect("s").parse().expect("s");
            let a: u32 = it.next().expect("a").parse().expect("a");
            let m: Vec<u64> = it.map(|t| t.parse().expect("m")).collect();
            assert_eq!(m.len(), s as usize, "malformed direction table row");
            DirectionRow { s, a, m }
        })
        .collect()
}

// Direction integers v_k = m_k << (BITS - k) for one dimension.
fn direction_integers(row: Option<&DirectionRow>) -> [u64; BITS as usize] {
    let mut v = [0u64; BITS as usize];
    match row {
        // dimension 1: m_k = 1 for all k
        None => {
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = 1u64 << (BITS as usize - 1 - k);
            }
        }
        Some(row) => {
            let s = row.s as usize;
            for k in 0..s.min(BITS as usize) {
                v[k] = row.m[k] << (BITS as usize - 1 - k);
            }
            for k in s..BITS as usize {
                let mut val = v[k - s] ^ (v[k - s] >> s);
                for i in 1..s {
                    if (row.a >> (s - 1 - i)) & 1 == 1 {
                        val ^= v[k - i];
                    }
                }
                v[k] = val;
            }
        }
    }
    v
}

/// Generate the first `n` points after the all-zeros point.
pub(crate) fn generate(m: usize, n: usize) -> Vec<Vec<f64>> {
    let table = super::direction_table();
    let dirs: Vec<[u64; BITS as usize]> = (0..m)
        .map(|d| {
            if d == 0 {
                direction_integers(None)
            } else {
                direction_integers(Some(&table[d - 1]))
            }
        })
        .collect();

    let scale = 1.0 / (1u64 << BITS) as f64;
    let mut state = vec![0u64; m];
    let mut out = Vec::with_capacity(n);
    for i in 1..=n as u64 {
        // position of the rightmost zero bit of i-1 (Gray-code step)
        let c = (i - 1).trailing_ones() as usize;
        for (d, s) in state.iter_mut().enumerate() {
            *s ^= dirs[d][c];
        }
        out.push(state.iter().map(|&s| s as f64 * scale).collect());
    }
    out
}
