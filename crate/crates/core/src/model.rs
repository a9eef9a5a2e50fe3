//! The nonlinearity f(s) = (s^+)^q with 3 < q < 5, its primitive F, the
//! linear-capped f~ used outside the enlarged wells, the mixed g, and the
//! constants (delta, nu, a) tying them together.
//!
//! With delta in (0,1) fixed, nu = 1 - delta is the sharpest constant with
//! ||u||_{lambda,O}^2 - nu |u|_{2,O}^2 >= delta ||u||_{lambda,O}^2, and the
//! cap level a solves f(a)/a = nu, i.e. a = nu^{1/(q-1)} for the power
//! nonlinearity. f is extended by zero on s <= 0 (positive solutions only).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponent, coercivity constant and derived cutoff data.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    /// Nonlinearity exponent, 3 < q < 5.
    pub q: f64,
    /// delta in (0,1); nu = 1 - delta.
    pub delta_coercivity: f64,
    pub nu: f64,
    /// Cap level: f(a_cut)/a_cut = nu.
    pub a_cut: f64,
    /// Ambrosetti-Rabinowitz constant; q + 1 for the power model.
    pub theta: f64,
}

impl ModelParams {
    pub fn new(q: f64, delta_coercivity: f64) -> Result<Self> {
        if !(q > 3.0 && q < 5.0) {
            return Err(Error::InvalidParam(format!(
                "exponent q must lie in (3,5), got {q}"
            )));
        }
        let (nu, a_cut) = cutoff_constants(delta_coercivity, q)?;
        Ok(ModelParams {
            q,
            delta_coercivity,
            nu,
            a_cut,
            theta: q + 1.0,
        })
    }

    #[inline]
    fn pow_q(&self, s: f64) -> f64 {
        // hot path: the default q = 4
        if self.q == 4.0 {
            let s2 = s * s;
            s2 * s2
        } else {
            s.powf(self.q)
        }
    }

    #[inline]
    fn pow_q1(&self, s: f64) -> f64 {
        if self.q == 4.0 {
            let s2 = s * s;
            s2 * s2 * s
        } else {
            s.powf(self.q + 1.0)
        }
    }
}

/// nu = 1 - delta and the cap level a with f(a)/a = nu.
pub fn cutoff_constants(delta: f64, q: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParam(format!(
            "delta_coercivity must lie in (0,1), got {delta}"
        )));
    }
    if !(q > 3.0 && q < 5.0) {
        return Err(Error::InvalidParam(format!(
            "exponent q must lie in (3,5), got {q}"
        )));
    }
    let nu = 1.0 - delta;
    let a_cut = nu.powf(1.0 / (q - 1.0));
    let check = a_cut.powf(q - 1.0);
    if (check - nu).abs() > 1e-14 * nu {
        return Err(Error::InvalidParam(format!(
            "cap level self-check failed: f(a)/a = {check}, nu = {nu}"
        )));
    }
    Ok((nu, a_cut))
}

/// f(s) = (s^+)^q.
#[inline]
pub fn f_eval(s: f64, p: &ModelParams) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        p.pow_q(s)
    }
}

/// F(s) = (s^+)^(q+1) / (q+1).
#[inline]
pub fn big_f_eval(s: f64, p: &ModelParams) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        p.pow_q1(s) / (p.q + 1.0)
    }
}

/// f~(s): f below the cap, nu s above it. Continuous at s = a_cut because
/// f(a_cut) = nu a_cut.
#[inline]
pub fn f_tilde(s: f64, p: &ModelParams) -> f64 {
    if s <= p.a_cut {
        f_eval(s, p)
    } else {
        p.nu * s
    }
}

/// Exact primitive of f~.
#[inline]
pub fn big_f_tilde(s: f64, p: &ModelParams) -> f64 {
    if s <= p.a_cut {
        big_f_eval(s, p)
    } else {
        big_f_eval(p.a_cut, p) + 0.5 * p.nu * (s * s - p.a_cut * p.a_cut)
    }
}

/// g(x,s) = f(s) inside the enlarged selected wells, f~(s) outside.
#[inline]
pub fn g_eval(inside_upsilon_prime: bool, s: f64, p: &ModelParams) -> f64 {
    if inside_upsilon_prime {
        f_eval(s, p)
    } else {
        f_tilde(s, p)
    }
}

/// Primitive of g in s.
#[inline]
pub fn big_g_eval(inside_upsilon_prime: bool, s: f64, p: &ModelParams) -> f64 {
    if inside_upsilon_prime {
        big_f_eval(s, p)
    } else {
        big_f_tilde(s, p)
    }
}
