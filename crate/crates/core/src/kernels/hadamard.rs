use super::DenseMatrix;
use crate::error::{Error, Result};

/// Hadamard matrix of order `n` as rows of ±1 entries.
///
/// Orders of the form `2^a` use Sylvester doubling from `[1]`. Orders
/// `2^a (q + 1)` with `q` a prime, `q ≡ 3 (mod 4)` double a Paley type I seed;
/// this covers 12 and 20 and therefore 96 = 8 · 12.
pub fn hadamard_signs(n: usize) -> Result<Vec<Vec<i8>>> {
    if n == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let twos = n.trailing_zeros();
    let odd = n >> twos;

    let (mut h, doublings) = if odd == 1 {
        (vec![vec![1i8]], twos)
    } else {
        let (seed, used) = (0..=twos)
            .find_map(|b| {
                let order = odd << b;
                let q = order - 1;
                (q % 4 == 3 && is_prime(q)).then(|| (paley_one(q), b))
            })
            .ok_or(Error::UnsupportedOrder(n))?;
        (seed, twos - used)
    };

    for _ in 0..doublings {
        h = sylvester_double(&h);
    }
    debug_assert_eq!(h.len(), n);
    Ok(h)
}

/// Hadamard matrix of order `n` with ±1.0 entries; `H^T H = n I`.
pub fn hadamard(n: usize) -> Result<DenseMatrix> {
    let h = hadamard_signs(n)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| f64::from(h[i][j])))
}

fn sylvester_double(h: &[Vec<i8>]) -> Vec<Vec<i8>> {
    let top = h.iter().map(|row| row.iter().chain(row).copied().collect());
    let bottom = h
        .iter()
        .map(|row| row.iter().copied().chain(row.iter().map(|v| -v)).collect());
    top.chain(bottom).collect()
}

/// Paley construction I: order q + 1 from the quadratic character mod q.
fn paley_one(q: usize) -> Vec<Vec<i8>> {
    let mut residue = vec![false; q];
    for x in 1..q {
        residue[x * x % q] = true;
    }
    let chi = |a: usize| -> i8 {
        match a % q {
            0 => 0,
            r if residue[r] => 1,
            _ => -1,
        }
    };

    let n = q + 1;
    let mut h = vec![vec![0i8; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let s = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => chi(j + q - i),
            };
            *entry = s + i8::from(i == j);
        }
    }
    h
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}
