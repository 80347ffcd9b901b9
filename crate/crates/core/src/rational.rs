//! Exact rational arithmetic helpers and decimal formatting.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every boundary coordinate, length and radius.
///
/// Wraps `Ratio<i128>` so that comparisons use cross-multiplication instead of the
/// division-based ordering of the underlying type.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rat(Ratio<i128>);

impl Rat {
    pub fn new(n: i128, d: i128) -> Rat {
        Rat(Ratio::new(n, d))
    }
    pub fn from_integer(n: i128) -> Rat {
        Rat(Ratio::from_integer(n))
    }
    pub fn numer(&self) -> &i128 {
        self.0.numer()
    }
    pub fn denom(&self) -> &i128 {
        self.0.denom()
    }
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
    pub fn floor(&self) -> Rat {
        Rat(self.0.floor())
    }
    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        if a.denom() == b.denom() {
            return a.numer().cmp(b.numer());
        }
        match (a.numer().checked_mul(*b.denom()), b.numer().checked_mul(*a.denom())) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => a.cmp(b),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rat(self))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rat(self))
    }
}

fn small(x: &Ratio<i128>) -> Option<(i64, i64)> {
    Some((i64::try_from(*x.numer()).ok()?, i64::try_from(*x.denom()).ok()?))
}

fn raw(n: i64, d: i64) -> Rat {
    Rat(Ratio::new_raw(n as i128, d as i128))
}

/// `a/b + c/d` on machine words when nothing overflows; the result is already reduced.
fn add_small(a: &Ratio<i128>, b: &Ratio<i128>, negate: bool) -> Option<Rat> {
    use num_integer::Integer;
    let (n1, d1) = small(a)?;
    let (n2, d2) = small(b)?;
    let n2 = if negate { n2.checked_neg()? } else { n2 };
    let g = d1.gcd(&d2);
    let l = (d1 / g).checked_mul(d2)?;
    let n = n1.checked_mul(l / d1)?.checked_add(n2.checked_mul(l / d2)?)?;
    if n == 0 {
        return Some(raw(0, 1));
    }
    let h = n.gcd(&l);
    Some(raw(n / h, l / h))
}

fn mul_small(a: &Ratio<i128>, b: &Ratio<i128>) -> Option<Rat> {
    use num_integer::Integer;
    let (n1, d1) = small(a)?;
    let (n2, d2) = small(b)?;
    if n1 == 0 || n2 == 0 {
        return Some(raw(0, 1));
    }
    let g1 = n1.gcd(&d2);
    let g2 = n2.gcd(&d1);
    Some(raw((n1 / g1).checked_mul(n2 / g2)?, (d1 / g2).checked_mul(d2 / g1)?))
}

fn rat_add(a: &Ratio<i128>, b: &Ratio<i128>) -> Rat {
    add_small(a, b, false).unwrap_or_else(|| Rat(a + b))
}

fn rat_sub(a: &Ratio<i128>, b: &Ratio<i128>) -> Rat {
    add_small(a, b, true).unwrap_or_else(|| Rat(a - b))
}

fn rat_mul(a: &Ratio<i128>, b: &Ratio<i128>) -> Rat {
    mul_small(a, b).unwrap_or_else(|| Rat(a * b))
}

fn rat_div(a: &Ratio<i128>, b: &Ratio<i128>) -> Rat {
    if b.is_zero() {
        panic!("division of a rational by zero");
    }
    let inv = if b.numer().is_negative() { Ratio::new_raw(-*b.denom(), -*b.numer()) } else { Ratio::new_raw(*b.denom(), *b.numer()) };
    rat_mul(a, &inv)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $f:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                $f(&self.0, &o.0)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                $f(&self.0, &o.0)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                $f(&self.0, &o.0)
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                $f(&self.0, &o.0)
            }
        }
        impl $atr<Rat> for Rat {
            fn $am(&mut self, o: Rat) {
                *self = $f(&self.0, &o.0)
            }
        }
        impl $atr<&Rat> for Rat {
            fn $am(&mut self, o: &Rat) {
                *self = $f(&self.0, &o.0)
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, rat_add);
binop!(Sub, sub, SubAssign, sub_assign, rat_sub);
binop!(Mul, mul, MulAssign, mul_assign, rat_mul);
binop!(Div, div, DivAssign, div_assign, rat_div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat(Ratio::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat(Ratio::one())
    }
}

/// Builds `n/d` (panics on a zero denominator).
pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

/// Builds the integer `n` as a rational.
pub fn int(n: i128) -> Rat {
    Rat::from_integer(n)
}

/// Parses `n`, `-n`, `n/d` or a terminating decimal such as `0.125`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.is_empty() && !whole_digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let w: i128 = if whole_digits.is_empty() { 0 } else { whole_digits.parse().ok()? };
        let f: i128 = frac.parse().ok()?;
        let scale = 10i128.checked_pow(frac.len() as u32)?;
        let value = Rat::new(w.checked_mul(scale)?.checked_add(f)?, scale);
        return Some(if negative { -value } else { value });
    }
    s.parse::<i128>().ok().map(Rat::from_integer)
}

/// Canonical text form: `n` for integers, `n/d` otherwise.
pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest double to an exact rational.
pub fn to_f64(x: &Rat) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(Rat::zero());
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (n * n == *x.numer() && d * d == *x.denom()).then(|| Rat::new(n, d))
}

/// `ln(x)` for a positive rational, accurate for numerators and denominators beyond 2^53.
pub fn ln_rat(x: &Rat) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    n.ln() - d.ln()
}

/// `ln(hi/lo)` computed as `ln_1p((hi-lo)/lo)` so that ratios close to one keep full precision.
pub fn ln_ratio(hi: &Rat, lo: &Rat) -> f64 {
    let rel = (hi - lo) / lo;
    to_f64(&rel).ln_1p()
}

/// Decimal rendering with 12 significant digits.
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let digits = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", digits, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.11e}", x)
    }
}

/// A positive quantity stored by its natural logarithm, for values such as `exp(10^4)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_value(x: f64) -> Self {
        LogValue { ln: x.ln() }
    }

    /// The value itself, or `None` if it does not fit in a double.
    pub fn value(&self) -> Option<f64> {
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }

    /// Decimal rendering with 12 significant digits, using a base-10 exponent for huge values.
    pub fn render(&self) -> String {
        match self.value() {
            Some(v) => decimal(v),
            None => {
                let l10 = self.ln / std::f64::consts::LN_10;
                let e = l10.floor();
                let mantissa = 10f64.powf(l10 - e);
                format!("{:.11}e{}", mantissa, e as i64)
            }
        }
    }
}
