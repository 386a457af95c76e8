//! Adaptive Gauss-Kronrod integration for the phi-weighted semi-infinite
//! integrals behind every consistency-probability evaluator.
//!
//! All integrands handled here are bounded by the standard normal density,
//! so the semi-infinite upper limit is truncated at `U_TRUNC` = 8 in
//! standardized units, where the remaining phi mass is below 1e-15. Each
//! panel is scored with a 15-point Kronrod rule nested over 7-point Gauss;
//! the worst panel is split until the summed error estimate meets the
//! requested tolerance.

use crate::error::{Error, Result};

/// Upper truncation point for phi-weighted integrands.
pub const U_TRUNC: f64 = 8.0;

const MAX_PANELS: usize = 4000;

/// One-dimensional integral of a phi-weighted integrand over
/// [lower, U_TRUNC].
pub struct IntegralSpec1D<'a> {
    pub lower: f64,
    pub integrand: &'a dyn Fn(f64) -> f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl<'a> IntegralSpec1D<'a> {
    pub fn new(lower: f64, integrand: &'a dyn Fn(f64) -> f64) -> Self {
        Self {
            lower,
            integrand,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
        }
    }
}

/// Two-dimensional analogue over [lower_u, U_TRUNC] x [lower_v, U_TRUNC].
pub struct IntegralSpec2D<'a> {
    pub lower_u: f64,
    pub lower_v: f64,
    pub integrand: &'a dyn Fn(f64, f64) -> f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl<'a> IntegralSpec2D<'a> {
    pub fn new(lower_u: f64, lower_v: f64, integrand: &'a dyn Fn(f64, f64) -> f64) -> Self {
        Self {
            lower_u,
            lower_v,
            integrand,
            abs_tol: 1e-8,
            rel_tol: 1e-8,
        }
    }
}

// 15-point Kronrod nodes (positive half) with embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Kronrod-15 estimate and |K15 - G7| error for one panel.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    let result = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (result, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive integral over [spec.lower, U_TRUNC].
pub fn integrate_1d(spec: &IntegralSpec1D<'_>) -> Result<f64> {
    if !(spec.abs_tol > 0.0 && spec.rel_tol >= 0.0) {
        return Err(Error::invalid("integrate_1d: tolerances must be positive"));
    }
    if !spec.lower.is_finite() {
        return Err(Error::invalid("integrate_1d: lower limit must be finite"));
    }
    if spec.lower >= U_TRUNC {
        // phi mass beyond the truncation point is below 1e-15
        return Ok(0.0);
    }
    let f = spec.integrand;
    let (v, e) = gk15(f, spec.lower, U_TRUNC);
    let mut panels = vec![Panel {
        a: spec.lower,
        b: U_TRUNC,
        value: v,
        error: e,
    }];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergence {
                error_estimate: err,
                panels: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (v, e) = gk15(f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
    }
}

/// Iterated adaptive integral over the product domain. The inner integral
/// runs at a tolerance tightened by the outer interval length so its error
/// stays inside the overall budget.
pub fn integrate_2d(spec: &IntegralSpec2D<'_>) -> Result<f64> {
    if !(spec.abs_tol > 0.0 && spec.rel_tol >= 0.0) {
        return Err(Error::invalid("integrate_2d: tolerances must be positive"));
    }
    if !(spec.lower_u.is_finite() && spec.lower_v.is_finite()) {
        return Err(Error::invalid("integrate_2d: lower limits must be finite"));
    }
    if spec.lower_u >= U_TRUNC || spec.lower_v >= U_TRUNC {
        return Ok(0.0);
    }
    let width = U_TRUNC - spec.lower_u;
    let inner_abs = (spec.abs_tol / (4.0 * width)).max(1e-14);
    let f = spec.integrand;
    let lower_v = spec.lower_v;
    let outer = move |u: f64| -> f64 {
        let g = |v: f64| f(u, v);
        let inner = IntegralSpec1D {
            lower: lower_v,
            integrand: &g,
            abs_tol: inner_abs,
            rel_tol: 0.0,
        };
        // The inner integrand inherits smoothness from the outer one; a
        // failure here surfaces through the outer tolerance check.
        integrate_1d(&inner).unwrap_or(f64::NAN)
    };
    let spec_outer = IntegralSpec1D {
        lower: spec.lower_u,
        integrand: &outer,
        abs_tol: spec.abs_tol,
        rel_tol: spec.rel_tol,
    };
    let value = integrate_1d(&spec_outer)?;
    if value.is_nan() {
        return Err(Error::QuadratureNonConvergence {
            error_estimate: f64::NAN,
            panels: MAX_PANELS,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{norm_pdf, norm_quantile, phi};

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: {actual} vs {expected} (tol {tol:.1e})"
        );
    }

    #[test]
    fn normalization_from_far_left() {
        let f = |u: f64| norm_pdf(u);
        let v = integrate_1d(&IntegralSpec1D::new(-8.0, &f)).unwrap();
        assert_close(v, 1.0, 1e-10, "phi integrates to 1");
    }

    #[test]
    fn quantile_truncation() {
        let f = |u: f64| norm_pdf(u);
        let lower = -norm_quantile(0.8).unwrap();
        let v = integrate_1d(&IntegralSpec1D::new(lower, &f)).unwrap();
        assert_close(v, 0.8, 1e-10, "phi mass above -z_{0.8}");
    }

    #[test]
    fn cdf_density_product_closed_form() {
        // d/dx [Phi(x)^2 / 2] = Phi(x) phi(x)
        let f = |u: f64| phi(u) * norm_pdf(u);
        let v = integrate_1d(&IntegralSpec1D::new(-8.0, &f)).unwrap();
        assert_close(v, 0.5, 1e-9, "integral of Phi*phi");
    }

    #[test]
    fn empty_domain_is_zero() {
        let f = |u: f64| norm_pdf(u);
        let v = integrate_1d(&IntegralSpec1D::new(9.0, &f)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let f = |u: f64| norm_pdf(u);
        let spec = IntegralSpec1D {
            lower: 0.0,
            integrand: &f,
            abs_tol: 0.0,
            rel_tol: 1e-10,
        };
        assert!(integrate_1d(&spec).is_err());
    }

    #[test]
    fn two_dim_normalization_and_product() {
        let f = |u: f64, v: f64| norm_pdf(u) * norm_pdf(v);
        let v = integrate_2d(&IntegralSpec2D::new(-8.0, -8.0, &f)).unwrap();
        assert_close(v, 1.0, 1e-8, "phi x phi integrates to 1");

        let lower = -norm_quantile(0.8).unwrap();
        let v = integrate_2d(&IntegralSpec2D::new(lower, lower, &f)).unwrap();
        assert_close(v, 0.64, 1e-8, "product of marginals");
    }

    #[test]
    fn two_dim_symmetric_cdf_weight() {
        // E[Phi(U + V)] = P(Z < U + V) = 1/2 by symmetry of Z - U - V.
        let f = |u: f64, v: f64| phi(u + v) * norm_pdf(u) * norm_pdf(v);
        let v = integrate_2d(&IntegralSpec2D::new(-8.0, -8.0, &f)).unwrap();
        assert_close(v, 0.5, 1e-7, "E[Phi(U+V)]");
    }

    #[test]
    fn separable_matches_product_of_one_dim() {
        let g = |u: f64| phi(u) * norm_pdf(u);
        let f2 = |u: f64, v: f64| g(u) * g(v);
        let one = integrate_1d(&IntegralSpec1D::new(-1.0, &g)).unwrap();
        let two = integrate_2d(&IntegralSpec2D::new(-1.0, -1.0, &f2)).unwrap();
        assert_close(two, one * one, 1e-8, "separable 2-D");
    }

    #[test]
    fn tolerance_halving_stays_within_estimate() {
        let f = |u: f64| phi(2.0 * u + 0.3) * norm_pdf(u);
        let loose = IntegralSpec1D {
            lower: -1.5,
            integrand: &f,
            abs_tol: 1e-8,
            rel_tol: 0.0,
        };
        let tight = IntegralSpec1D {
            lower: -1.5,
            integrand: &f,
            abs_tol: 5e-13,
            rel_tol: 0.0,
        };
        let a = integrate_1d(&loose).unwrap();
        let b = integrate_1d(&tight).unwrap();
        assert!(
            (a - b).abs() <= 1e-8,
            "refinement moved result by {:.2e}",
            (a - b).abs()
        );
    }

    #[test]
    fn monotone_in_dominated_integrand() {
        let small = |u: f64| phi(u - 1.0) * norm_pdf(u);
        let large = |u: f64| phi(u + 1.0) * norm_pdf(u);
        let lo = integrate_1d(&IntegralSpec1D::new(-2.0, &small)).unwrap();
        let hi = integrate_1d(&IntegralSpec1D::new(-2.0, &large)).unwrap();
        assert!(lo < hi);
    }
}
