//! Second-order jets: a value together with its first two derivatives.

use std::ops::{Add, Mul, Sub};

/// `(f, f', f'')` at a point, over any ring-like scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T> Jet2<T> {
    pub fn new(value: T, d1: T, d2: T) -> Self {
        Jet2 { value, d1, d2 }
    }
}

impl<T> Jet2<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    /// Jet of `f(u)` given `f(u), f'(u), f''(u)`:
    /// `(f∘u)' = f'(u) u'` and `(f∘u)'' = f''(u) u'^2 + f'(u) u''`.
    pub fn compose(&self, f0: T, f1: T, f2: T) -> Jet2<T> {
        let d1 = f1.clone() * self.d1.clone();
        let d2 = f2 * self.d1.clone() * self.d1.clone() + f1 * self.d2.clone();
        Jet2 { value: f0, d1, d2 }
    }

    pub fn scale(&self, k: &T) -> Jet2<T> {
        Jet2 {
            value: k.clone() * self.value.clone(),
            d1: k.clone() * self.d1.clone(),
            d2: k.clone() * self.d2.clone(),
        }
    }
}

impl<T> Add for Jet2<T>
where
    T: Add<Output = T>,
{
    type Output = Jet2<T>;
    fn add(self, rhs: Jet2<T>) -> Jet2<T> {
        Jet2 { value: self.value + rhs.value, d1: self.d1 + rhs.d1, d2: self.d2 + rhs.d2 }
    }
}

impl<T> Sub for Jet2<T>
where
    T: Sub<Output = T>,
{
    type Output = Jet2<T>;
    fn sub(self, rhs: Jet2<T>) -> Jet2<T> {
        Jet2 { value: self.value - rhs.value, d1: self.d1 - rhs.d1, d2: self.d2 - rhs.d2 }
    }
}

impl<T> Mul for Jet2<T>
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
{
    type Output = Jet2<T>;
    /// Leibniz rule up to second order.
    fn mul(self, rhs: Jet2<T>) -> Jet2<T> {
        let value = self.value.clone() * rhs.value.clone();
        let d1 = self.d1.clone() * rhs.value.clone() + self.value.clone() * rhs.d1.clone();
        let cross = self.d1 * rhs.d1;
        let d2 = self.d2 * rhs.value + cross.clone() + cross + self.value * rhs.d2;
        Jet2 { value, d1, d2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_polynomials() {
        // x^2 * x^3 at x = 2 -> x^5: (32, 80, 160)
        let x = 2.0f64;
        let a = Jet2::new(x * x, 2.0 * x, 2.0);
        let b = Jet2::new(x * x * x, 3.0 * x * x, 6.0 * x);
        let p = a * b;
        assert_eq!(p, Jet2::new(32.0, 80.0, 160.0));
    }

    #[test]
    fn chain_rule_exp_of_square() {
        // exp(x^2) at x = 0.5
        let x = 0.5f64;
        let u = Jet2::new(x * x, 2.0 * x, 2.0);
        let e = u.value.exp();
        let j = u.compose(e, e, e);
        assert!((j.d1 - 2.0 * x * e).abs() < 1e-15);
        assert!((j.d2 - (2.0 + 4.0 * x * x) * e).abs() < 1e-14);
    }
}
