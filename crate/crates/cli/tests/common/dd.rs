//! Double-double arithmetic (~32 significant digits) for re-evaluating the
//! certification pipeline through the naive formulas, independently of the
//! library's cancellation-free rewrites.
//!
//! A value is an unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2. Sums and
//! products use the Dekker/Knuth error-free transformations; elementary
//! functions use plain Taylor/Newton iterations adequate for the argument
//! ranges of this suite (|x| ≤ 1.6 for the trig series).

#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(Dd {
            hi: -rhs.hi,
            lo: -rhs.lo,
        })
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul(Dd::from(q1)));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul(Dd::from(q2)));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn scale(self, k: f64) -> Dd {
        self.mul(Dd::from(k))
    }

    pub fn sqr(self) -> Dd {
        self.mul(self)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(0.0);
        }
        // One Newton step on top of the double estimate doubles the digits.
        let y = Dd::from(self.hi.sqrt());
        let refined = y.add(self.sub(y.sqr()).div(y.scale(2.0)));
        refined.add(self.sub(refined.sqr()).div(refined.scale(2.0)))
    }

    /// Taylor sine, adequate to ~1e-31 for |x| ≤ 1.6.
    pub fn sin(self) -> Dd {
        let x2 = self.sqr();
        let mut term = self;
        let mut sum = self;
        let mut k = 1.0;
        for _ in 0..24 {
            term = term
                .mul(x2)
                .scale(-1.0)
                .div(Dd::from((k + 1.0) * (k + 2.0)));
            sum = sum.add(term);
            k += 2.0;
        }
        sum
    }

    /// Taylor cosine, adequate to ~1e-31 for |x| ≤ 1.6.
    pub fn cos(self) -> Dd {
        let x2 = self.sqr();
        let mut term = Dd::from(1.0);
        let mut sum = Dd::from(1.0);
        let mut k = 0.0;
        for _ in 0..24 {
            term = term
                .mul(x2)
                .scale(-1.0)
                .div(Dd::from((k + 1.0) * (k + 2.0)));
            sum = sum.add(term);
            k += 2.0;
        }
        sum
    }

    /// Natural log via the atanh series, adequate for x within a factor of
    /// a few of one (the guessing bounds live in [1/2, 1]).
    pub fn ln(self) -> Dd {
        let u = self.sub(Dd::from(1.0)).div(self.add(Dd::from(1.0)));
        let u2 = u.sqr();
        let mut term = u;
        let mut sum = u;
        for k in 1..80 {
            term = term.mul(u2);
            sum = sum.add(term.div(Dd::from(2.0 * k as f64 + 1.0)));
        }
        sum.scale(2.0)
    }

    pub fn log2(self) -> Dd {
        self.ln().div(LN2)
    }
}

#[cfg(test)]
mod sanity {
    use super::*;

    #[test]
    fn dd_basics_round_trip() {
        let x = Dd::from(2.0).sqrt();
        assert!((x.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-16);
        let resid = x.sqr().sub(Dd::from(2.0));
        assert!(resid.to_f64().abs() < 1e-30);

        let s = Dd::from(1.5).sin();
        assert!((s.to_f64() - 1.5_f64.sin()).abs() < 1e-16);
        let c = Dd::from(1.5).cos();
        let one = s.sqr().add(c.sqr());
        assert!((one.to_f64() - 1.0).abs() < 1e-30);

        let l = Dd::from(0.52).ln();
        assert!((l.to_f64() - 0.52_f64.ln()).abs() < 1e-16);
    }
}
