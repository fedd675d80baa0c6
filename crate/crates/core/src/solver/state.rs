use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{apply_b, apply_b_inv};
use crate::spectral::{Field, GridSpec};

/// Second-order state `(u, u_t)` at time `t`; both components real.
#[derive(Clone, Debug, PartialEq)]
pub struct KgState {
    u: Field,
    ut: Field,
    time: f64,
}

impl KgState {
    pub fn new(u: Field, ut: Field, time: f64) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::GridMismatch);
        }
        let u = u.checked_real()?;
        let ut = ut.checked_real()?;
        Ok(Self { u, ut, time })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { u: Field::zeros(grid), ut: Field::zeros(grid), time: 0.0 }
    }

    pub(crate) fn from_parts_unchecked(u: Field, ut: Field, time: f64) -> Self {
        Self { u: u.project_real(), ut: ut.project_real(), time }
    }

    pub fn u(&self) -> &Field {
        &self.u
    }

    pub fn ut(&self) -> &Field {
        &self.ut
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn grid(&self) -> GridSpec {
        self.u.grid()
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn into_parts(self) -> (Field, Field, f64) {
        (self.u, self.ut, self.time)
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.ut.max_abs())
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.ut.is_zero()
    }

    /// Componentwise `a·self + b·other`, keeping `self`'s time.
    pub fn combine(&self, a: f64, other: &KgState, b: f64) -> Result<KgState> {
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        Ok(Self { u: self.u.axpby(ca, &other.u, cb)?, ut: self.ut.axpby(ca, &other.ut, cb)?, time: self.time })
    }
}

/// Complex state `v = u + i B^{-1} u_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderState {
    v: Field,
    time: f64,
}

impl FirstOrderState {
    pub fn new(v: Field, time: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::InvalidParams("first-order state has non-finite values".into()));
        }
        Ok(Self { v, time })
    }

    pub fn v(&self) -> &Field {
        &self.v
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn into_field(self) -> Field {
        self.v
    }
}

pub fn to_first_order(s: &KgState) -> FirstOrderState {
    let w = apply_b_inv(&s.ut);
    let v = s.u.complexify(&w).expect("components share a grid");
    FirstOrderState { v, time: s.time }
}

/// `u = Re v`, `u_t = B Im v`.
pub fn from_first_order(v: &FirstOrderState) -> KgState {
    let u = v.v.re();
    let ut = apply_b(&v.v.im());
    KgState { u, ut, time: v.time }
}
