//! Oracles and generators shared by the integration tests. Nothing here
//! calls into the library's own linear algebra.
#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rbdcalc::handlecalc::{HandleExpression, TwoHandle};
use rbdcalc::lattice::SymmetricForm;
use rbdcalc::numbers::{lens_normalize, LensSpace};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let x = rng.gen_range(-bound..=bound);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    m
}

pub fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn bareiss_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Value of the negative continued fraction `a1 - 1/(a2 - ...)` via the
/// numerator/denominator recurrence, as a reduced `(num, den)` with `den > 0`.
pub fn cf_oracle(coeffs: &[i64]) -> (i128, i128) {
    // p_k / q_k for the tail starting at index k, built from the back.
    let (mut p, mut q): (i128, i128) = (coeffs[coeffs.len() - 1] as i128, 1);
    for &a in coeffs[..coeffs.len() - 1].iter().rev() {
        let (np, nq) = (a as i128 * p - q, p);
        p = np;
        q = nq;
    }
    let g = gcd(p.abs(), q.abs());
    let (p, q) = (p / g, q / g);
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ------------------------------------------------------------- polynomials

type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn deriv(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
}

fn divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c * bc;
        }
        quo[shift] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

fn monic(p: Poly) -> Poly {
    let lead = p.last().expect("nonzero").clone();
    p.into_iter().map(|c| c / &lead).collect()
}

fn pgcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect(),
    )
}

/// `det(xI - A)` by Faddeev-LeVerrier, coefficients from low to high degree.
pub fn char_poly(a: &[Vec<BigRational>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / q(k as i64);
    }
    coeffs
}

fn sign_changes(values: &[BigRational]) -> usize {
    let signs: Vec<bool> = values.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Distinct roots of a square-free `p` with `p(0) != 0` in `(0, inf)`.
fn sturm_positive_roots(p: &Poly) -> usize {
    if p.len() <= 1 {
        return 0;
    }
    let mut chain = vec![p.clone(), deriv(p)];
    loop {
        let (_, r) = divmod(&chain[chain.len() - 2], &chain[chain.len() - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    let at_zero: Vec<BigRational> = chain.iter().map(|s| eval(s, &BigRational::zero())).collect();
    let at_inf: Vec<BigRational> = chain.iter().map(|s| s.last().cloned().unwrap_or_else(BigRational::zero)).collect();
    sign_changes(&at_zero) - sign_changes(&at_inf)
}

/// `(positive, negative, zero)` eigenvalue counts of a symmetric matrix from
/// Sturm sequences of the square-free parts of its characteristic polynomial.
pub fn sturm_inertia(a: &[Vec<BigRational>]) -> (usize, usize, usize) {
    let n = a.len();
    let p = char_poly(a);
    let zero = p.iter().position(|c| !c.is_zero()).unwrap_or(n);
    let f: Poly = p[zero..].to_vec();
    if f.len() <= 1 {
        return (0, n - zero, zero);
    }
    // Yun's square-free factorisation.
    let mut positive = 0;
    let fp = deriv(&f);
    let a0 = pgcd(&f, &fp);
    let mut b = divmod(&f, &a0).0;
    let c = divmod(&fp, &a0).0;
    let mut d = sub(&c, &deriv(&b));
    let mut multiplicity = 1;
    while b.len() > 1 {
        let ai = pgcd(&b, &d);
        positive += multiplicity * sturm_positive_roots(&ai);
        let nb = divmod(&b, &ai).0;
        let nc = divmod(&d, &ai).0;
        d = sub(&nc, &deriv(&nb));
        b = nb;
        multiplicity += 1;
    }
    (positive, n - zero - positive, zero)
}

// ------------------------------------------------------------- expressions

/// A random handle expression with at most `max_handles` handles in total,
/// windings in `[-3, 3]` and form entries in `[-9, 9]`.
pub fn random_expression(rng: &mut ChaCha8Rng, max_handles: usize) -> HandleExpression {
    let k = rng.gen_range(0..=2.min(max_handles - 1));
    let m = rng.gen_range(1..=max_handles - k);
    let ones: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let twos: Vec<TwoHandle> = (0..m)
        .map(|i| TwoHandle { label: format!("a{i}"), winding: (0..k).map(|_| rng.gen_range(-3..=3)).collect() })
        .collect();
    let labels: Vec<String> = twos.iter().map(|h| h.label.clone()).collect();
    let form = SymmetricForm::from_integers(&labels, &random_symmetric(rng, m, 9)).unwrap();
    let boundary: Option<LensSpace> = if rng.gen_bool(0.5) {
        let p = rng.gen_range(2..30i64);
        let q = (1..p).find(|&q| gcd(p as i128, q as i128) == 1 && rng.gen_bool(0.3)).unwrap_or(1);
        Some(lens_normalize(p, q).unwrap())
    } else {
        None
    };
    HandleExpression::from_parts(ones, twos, form, Vec::new(), boundary).unwrap()
}
