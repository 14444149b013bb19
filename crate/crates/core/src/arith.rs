//! Small integer helpers shared across the crate.

/// Largest weight or degree accepted anywhere (2^63 - 1).
pub const MAX_ENTRY: u64 = i64::MAX as u64;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// gcd of a sequence; 0 for the empty sequence.
pub fn gcd_all<I: IntoIterator<Item = u64>>(it: I) -> u64 {
    it.into_iter().fold(0, gcd)
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        out.push(2);
        while n.is_multiple_of(2) {
            n /= 2;
        }
    }
    let mut q = 3u64;
    while q.saturating_mul(q) <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    prime_divisors(n) == [n]
}

/// Above this target the representability check switches from the table
/// over `0..=d` to shortest paths over residues modulo the smallest weight.
const DIRECT_TABLE_LIMIT: u64 = 1 << 20;

/// Whether `d` lies in the numerical semigroup generated by `weights`,
/// i.e. `d = sum c_i * w_i` with non-negative integers `c_i`.
///
/// `d = 0` is always representable (the empty sum).
pub fn is_representable(d: u64, weights: &[u64]) -> bool {
    let mut gens: Vec<u64> = weights.iter().copied().filter(|&w| w > 0).collect();
    gens.sort_unstable();
    gens.dedup();
    if d == 0 {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    if !d.is_multiple_of(gcd_all(gens.iter().copied())) {
        return false;
    }
    if gens[0] == 1 || gens.binary_search(&d).is_ok() {
        return true;
    }
    if d <= DIRECT_TABLE_LIMIT {
        representable_by_table(d, &gens)
    } else {
        representable_by_residues(d, &gens)
    }
}

fn representable_by_table(d: u64, gens: &[u64]) -> bool {
    let d = d as usize;
    let mut reach = vec![false; d + 1];
    reach[0] = true;
    for v in 1..=d {
        reach[v] = gens
            .iter()
            .any(|&g| (g as usize) <= v && reach[v - g as usize]);
    }
    reach[d]
}

// Smallest representable value in each residue class mod the least generator;
// d is representable iff it is at least that value in its class.
fn representable_by_residues(d: u64, gens: &[u64]) -> bool {
    let m = gens[0] as usize;
    let mut best = vec![u64::MAX; m];
    best[0] = 0;
    let mut done = vec![false; m];
    for _ in 0..m {
        let Some(u) = (0..m).filter(|&r| !done[r] && best[r] != u64::MAX).min_by_key(|&r| best[r])
        else {
            break;
        };
        done[u] = true;
        for &g in &gens[1..] {
            let Some(next) = best[u].checked_add(g) else { continue };
            let r = (next % m as u64) as usize;
            if next < best[r] {
                best[r] = next;
            }
        }
    }
    let r = (d % m as u64) as usize;
    best[r] != u64::MAX && best[r] <= d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd_all([4, 6, 10]), 2);
        assert_eq!(gcd_all(std::iter::empty()), 0);
    }

    #[test]
    fn prime_divisors_of_small_numbers() {
        assert_eq!(prime_divisors(1), Vec::<u64>::new());
        assert_eq!(prime_divisors(12), vec![2, 3]);
        assert_eq!(prime_divisors(97), vec![97]);
        assert!(is_prime(65521));
        assert!(!is_prime(65535));
    }

    #[test]
    fn representability_examples() {
        assert!(is_representable(4, &[2, 2, 2]));
        assert!(!is_representable(3, &[2, 2, 2]));
        assert!(!is_representable(1, &[2]));
        assert!(is_representable(0, &[7]));
        // Frobenius number of <4, 6, 9> is 11 (6+9 = 15, 4+9 = 13 ...)
        assert!(!is_representable(11, &[4, 6, 9]));
        assert!(is_representable(12, &[4, 6, 9]));
    }

    #[test]
    fn residue_route_matches_table() {
        for gens in [vec![3u64, 5], vec![4, 6, 9], vec![6, 10, 15], vec![7, 11]] {
            for d in 1..200u64 {
                assert_eq!(
                    representable_by_table(d, &gens),
                    representable_by_residues(d, &gens),
                    "d={d} gens={gens:?}"
                );
            }
        }
        assert!(is_representable((1 << 40) + 1, &[2, 3]));
        assert!(!is_representable((1 << 40) + 1, &[2, 4]));
    }
}
