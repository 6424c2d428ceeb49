//! Rough surface profiles Γ = {(s, f(s))} lying strictly below the
//! interface.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::green::Point2;

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampling used to estimate or verify profile bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSampling {
    pub half_width: f64,
    pub count: usize,
}

impl Default for BoundSampling {
    fn default() -> Self {
        BoundSampling { half_width: 50.0, count: 20_001 }
    }
}

#[derive(Clone)]
pub struct SurfaceProfile {
    pub name: String,
    f: ProfileFn,
    df: ProfileFn,
    d2f: ProfileFn,
    pub f_plus: f64,
    pub f_minus: f64,
    pub lipschitz_l: f64,
}

impl fmt::Debug for SurfaceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceProfile")
            .field("name", &self.name)
            .field("f_plus", &self.f_plus)
            .field("f_minus", &self.f_minus)
            .field("lipschitz_l", &self.lipschitz_l)
            .finish()
    }
}

/// Declared bounds of a user profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeclaredBounds {
    pub f_minus: f64,
    pub f_plus: f64,
    pub lipschitz_l: f64,
}

impl SurfaceProfile {
    /// Profile from height, slope and curvature callables. Declared bounds
    /// are spot-checked on the sample grid; without them the bounds are
    /// estimated from the samples.
    pub fn from_fns(
        name: impl Into<String>,
        f: ProfileFn,
        df: ProfileFn,
        d2f: ProfileFn,
        bounds: Option<DeclaredBounds>,
        sampling: BoundSampling,
    ) -> Result<Self> {
        let name = name.into();
        let n = sampling.count.max(2);
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        let mut lip = 0.0f64;
        for i in 0..n {
            let s = -sampling.half_width + 2.0 * sampling.half_width * i as f64 / (n - 1) as f64;
            let (v, d, dd) = (f(s), df(s), d2f(s));
            if !(v.is_finite() && d.is_finite() && dd.is_finite()) {
                return Err(Error::InvalidSurface(format!("{name}: non-finite value at s={s}")));
            }
            hi = hi.max(v);
            lo = lo.min(v);
            lip = lip.max(d.abs());
        }
        let (f_minus, f_plus, lipschitz_l) = match bounds {
            Some(b) => {
                let slack = 1e-12 * (1.0 + b.f_minus.abs());
                if hi > b.f_plus + slack || lo < b.f_minus - slack || lip > b.lipschitz_l + 1e-12 {
                    return Err(Error::InvalidSurface(format!(
                        "{name}: sampled range [{lo}, {hi}], |f'| <= {lip} violates declared bounds {b:?}"
                    )));
                }
                (b.f_minus, b.f_plus, b.lipschitz_l)
            }
            None => (lo, hi, lip),
        };
        if !(f_plus < 0.0) {
            return Err(Error::InvalidSurface(format!(
                "{name}: surface must lie strictly below the interface (sup f = {f_plus})"
            )));
        }
        Ok(SurfaceProfile { name, f, df, d2f, f_plus, f_minus, lipschitz_l })
    }

    /// Built-in profiles: `gamma1`, `gamma2` (flat, x₂ = −1) and `gamma3`.
    pub fn builtin(name: &str) -> Result<Self> {
        let sampling = BoundSampling::default();
        match name {
            "gamma1" => {
                let w = 0.7 * PI;
                Self::from_fns(
                    name,
                    Arc::new(move |t: f64| -1.0 + 0.3 * (w * t).sin() * (-0.4 * t * t).exp()),
                    Arc::new(move |t: f64| {
                        let e = (-0.4 * t * t).exp();
                        0.3 * e * (w * (w * t).cos() - 0.8 * t * (w * t).sin())
                    }),
                    Arc::new(move |t: f64| {
                        let e = (-0.4 * t * t).exp();
                        let (s, c) = (w * t).sin_cos();
                        // d/dt of e·(w c − 0.8 t s)
                        0.3 * e
                            * (-0.8 * t * (w * c - 0.8 * t * s) - w * w * s - 0.8 * s - 0.8 * t * w * c)
                    }),
                    None,
                    sampling,
                )
            }
            "gamma2" => Self::from_fns(
                name,
                Arc::new(|_| -1.0),
                Arc::new(|_| 0.0),
                Arc::new(|_| 0.0),
                Some(DeclaredBounds { f_minus: -1.0, f_plus: -1.0, lipschitz_l: 0.0 }),
                sampling,
            ),
            "gamma3" => {
                let w = 0.3 * PI;
                Self::from_fns(
                    name,
                    Arc::new(move |t: f64| -1.0 + 0.16 * (w * t).sin()),
                    Arc::new(move |t: f64| 0.16 * w * (w * t).cos()),
                    Arc::new(move |t: f64| -0.16 * w * w * (w * t).sin()),
                    Some(DeclaredBounds { f_minus: -1.16, f_plus: -0.84, lipschitz_l: 0.16 * w }),
                    sampling,
                )
            }
            other => Err(Error::Config(format!(
                "unknown surface '{other}' (expected gamma1, gamma2 or gamma3)"
            ))),
        }
    }

    /// Profile from an expression in t. Missing derivatives are obtained
    /// symbolically.
    pub fn from_expressions(f: &str, df: Option<&str>, d2f: Option<&str>) -> Result<Self> {
        let fe = Expr::parse(f)?;
        let dfe = match df {
            Some(s) => Expr::parse(s)?,
            None => fe.derivative(),
        };
        let d2fe = match d2f {
            Some(s) => Expr::parse(s)?,
            None => dfe.derivative(),
        };
        let sampling = BoundSampling::default();
        // user-given derivatives must agree with the height function
        if df.is_some() || d2f.is_some() {
            for i in 0..=200 {
                let t = -10.0 + 0.1 * i as f64;
                let h = 1e-5;
                let fd = (fe.eval(t + h) - fe.eval(t - h)) / (2.0 * h);
                let fd2 = (dfe.eval(t + h) - dfe.eval(t - h)) / (2.0 * h);
                if (fd - dfe.eval(t)).abs() > 1e-5 * (1.0 + fd.abs())
                    || (fd2 - d2fe.eval(t)).abs() > 1e-5 * (1.0 + fd2.abs())
                {
                    return Err(Error::InvalidSurface(format!(
                        "declared derivatives disagree with f at t={t}"
                    )));
                }
            }
        }
        let (a, b, c) = (fe.clone(), dfe, d2fe);
        Self::from_fns(
            format!("expr:{f}"),
            Arc::new(move |t| a.eval(t)),
            Arc::new(move |t| b.eval(t)),
            Arc::new(move |t| c.eval(t)),
            None,
            sampling,
        )
    }

    #[inline]
    pub fn height(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    #[inline]
    pub fn slope(&self, s: f64) -> f64 {
        (self.df)(s)
    }

    #[inline]
    pub fn curvature_term(&self, s: f64) -> f64 {
        (self.d2f)(s)
    }

    pub fn point(&self, s: f64) -> Point2 {
        Point2::new(s, self.height(s))
    }

    /// |x′(s)| = √(1 + f′(s)²).
    pub fn speed(&self, s: f64) -> f64 {
        self.slope(s).hypot(1.0)
    }

    /// Unit normal (f′, −1)/speed, pointing down out of the domain above Γ.
    pub fn normal(&self, s: f64) -> (f64, f64) {
        let d = self.slope(s);
        let sp = d.hypot(1.0);
        (d / sp, -1.0 / sp)
    }
}
