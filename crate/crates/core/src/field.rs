//! Unit scalars of the base field: exact rationals in characteristic zero,
//! arithmetic modulo p otherwise. The residue conditions of the pipeline
//! only ever multiply, invert, raise to powers and compare these.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Int, Rat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KScalar {
    Rat(Rat),
    Fp { p: u64, value: u64 },
}

impl KScalar {
    pub fn one(characteristic: u64) -> KScalar {
        match characteristic {
            0 => KScalar::Rat(Rat::from_integer(Int::from(1))),
            p => KScalar::Fp { p, value: 1 % p },
        }
    }

    pub fn from_int(characteristic: u64, n: &Int) -> KScalar {
        match characteristic {
            0 => KScalar::Rat(Rat::from_integer(n.clone())),
            p => KScalar::Fp {
                p,
                value: reduce(n, p),
            },
        }
    }

    /// Reduces a rational; in characteristic p the denominator must be a
    /// unit mod p.
    pub fn from_rat(characteristic: u64, r: &Rat) -> KScalar {
        match characteristic {
            0 => KScalar::Rat(r.clone()),
            p => {
                let num = reduce(r.numer(), p);
                let den = reduce(r.denom(), p);
                assert!(den != 0, "denominator not invertible mod {p}");
                KScalar::Fp {
                    p,
                    value: mulmod(num, inverse_mod(den, p), p),
                }
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            KScalar::Rat(r) => *r == Rat::from_integer(Int::from(1)),
            KScalar::Fp { p, value } => *value == 1 % p,
        }
    }

    pub fn mul(&self, other: &KScalar) -> KScalar {
        match (self, other) {
            (KScalar::Rat(a), KScalar::Rat(b)) => KScalar::Rat(a * b),
            (KScalar::Fp { p, value: a }, KScalar::Fp { p: q, value: b }) => {
                assert_eq!(p, q, "mixed characteristics");
                KScalar::Fp {
                    p: *p,
                    value: mulmod(*a, *b, *p),
                }
            }
            _ => panic!("mixed characteristics"),
        }
    }

    pub fn inv(&self) -> KScalar {
        match self {
            KScalar::Rat(r) => {
                assert!(!r.is_zero(), "inverting zero");
                KScalar::Rat(Rat::from_integer(Int::from(1)) / r.clone())
            }
            KScalar::Fp { p, value } => {
                assert!(*value != 0, "inverting zero mod {p}");
                KScalar::Fp {
                    p: *p,
                    value: inverse_mod(*value, *p),
                }
            }
        }
    }

    pub fn div(&self, other: &KScalar) -> KScalar {
        self.mul(&other.inv())
    }

    pub fn pow(&self, n: u64) -> KScalar {
        let mut acc = match self {
            KScalar::Rat(_) => KScalar::Rat(Rat::from_integer(Int::from(1))),
            KScalar::Fp { p, .. } => KScalar::Fp {
                p: *p,
                value: 1 % p,
            },
        };
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order; finite only in positive characteristic or for
    /// the rationals +-1.
    pub fn order(&self) -> Option<u64> {
        match self {
            KScalar::Rat(r) => {
                let one = Rat::from_integer(Int::from(1));
                if *r == one {
                    Some(1)
                } else if *r == -one {
                    Some(2)
                } else {
                    None
                }
            }
            KScalar::Fp { p, value } => {
                assert!(*value != 0);
                let mut acc = *value;
                let mut n = 1u64;
                while acc != 1 % p {
                    acc = mulmod(acc, *value, *p);
                    n += 1;
                }
                Some(n)
            }
        }
    }
}

impl std::fmt::Display for KScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KScalar::Rat(r) => write!(f, "{r}"),
            KScalar::Fp { p, value } => write!(f, "{value} mod {p}"),
        }
    }
}

fn reduce(n: &Int, p: u64) -> u64 {
    let m = n.mod_floor(&Int::from(p));
    m.abs().to_u64().expect("residue fits in u64")
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    // p is prime and a a unit
    let mut t = 0i128;
    let mut new_t = 1i128;
    let mut r = p as i128;
    let mut new_r = (a % p) as i128;
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not a unit mod {p}");
    (t.rem_euclid(p as i128)) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fp_arithmetic() {
        // (1/2)^2 = 1 in F_3
        let half = KScalar::from_rat(3, &Rat::new(Int::from(1), Int::from(2)));
        assert!(half.pow(2).is_one());
        // 9 = 2 in F_7
        let nine = KScalar::from_int(7, &Int::from(9));
        assert_eq!(nine, KScalar::Fp { p: 7, value: 2 });
    }

    #[test]
    fn rational_orders() {
        let one = KScalar::one(0);
        assert_eq!(one.order(), Some(1));
        let minus = KScalar::from_int(0, &Int::from(-1));
        assert_eq!(minus.order(), Some(2));
        let half = KScalar::from_rat(0, &Rat::new(Int::from(1), Int::from(2)));
        assert_eq!(half.order(), None);
        assert!(half.mul(&half.inv()).is_one());
    }
}
