use serde::Serialize;

use super::envelope::lower_convex_envelope;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbpReport {
    pub sup_uminus: f64,
    #[serde(rename = "contact_Ln_norm_fplus")]
    pub contact_ln_norm_fplus: f64,
    /// sup u⁻ / ‖f⁺‖_{Lⁿ(contact)}; 0 when sup u⁻ = 0, infinite when the
    /// norm vanishes but u⁻ does not.
    pub ratio: f64,
    pub contact_nodes: usize,
    pub contact_measure: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub b0: f64,
    pub envelope_sweeps: usize,
}

/// Compare sup u⁻ with the Lⁿ norm of f⁺ over the contact set {u = Γ_u}.
/// The structure constants are carried through to the report; the ratio
/// itself does not depend on them.
pub fn abp_check(
    u: &GridFunction,
    f: &GridFunction,
    lambda: f64,
    big_lambda: f64,
    b0: f64,
) -> Result<AbpReport> {
    if !u.same_layout(f) {
        return Err(Error::InvalidInput(
            "u and f live on different grids".into(),
        ));
    }
    if !(lambda > 0.0 && big_lambda >= lambda && b0 >= 0.0) {
        return Err(Error::Parameter(format!(
            "need 0 < lambda ≤ Lambda and b0 ≥ 0, got ({lambda}, {big_lambda}, {b0})"
        )));
    }
    let tol = 1e-8 * (1.0 + u.sup_norm());
    for k in 0..u.len() {
        if u.is_boundary(k) && u.values[k] < -tol {
            return Err(Error::Precondition(format!(
                "u = {} < 0 at boundary point {:?}",
                u.values[k],
                u.point(k)
            )));
        }
    }
    let n = u.dim();
    let env = lower_convex_envelope(u)?;
    let sup_uminus = u.values.iter().fold(0.0f64, |m, &v| m.max(-v));
    let cell = u.spacing.powi(n as i32);
    let mut sum = 0.0;
    let mut contact_nodes = 0;
    for (k, &c) in env.contact_mask.iter().enumerate() {
        // Only points where u⁻ > 0 belong to the contact set of interest;
        // Γ = 0 = −u⁻ on {u ≥ 0} carries no information.
        if c && u.values[k] < 0.0 {
            contact_nodes += 1;
            sum += f.values[k].max(0.0).powi(n as i32) * cell;
        }
    }
    let norm = sum.powf(1.0 / n as f64);
    let ratio = if sup_uminus == 0.0 {
        0.0
    } else if norm == 0.0 {
        f64::INFINITY
    } else {
        sup_uminus / norm
    };
    Ok(AbpReport {
        sup_uminus,
        contact_ln_norm_fplus: norm,
        ratio,
        contact_nodes,
        contact_measure: contact_nodes as f64 * cell,
        lambda,
        big_lambda,
        b0,
        envelope_sweeps: env.sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_u_has_zero_ratio() {
        let u = GridFunction::on_box(2, -1.0, 1.0, 0.125, |x| 1.0 - x[0] * x[0]).unwrap();
        let f = u.with_values(|_| 1.0);
        let r = abp_check(&u, &f, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(r.sup_uminus, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn negative_boundary_is_refused() {
        let u = GridFunction::on_box(2, -1.0, 1.0, 0.25, |_| -1.0).unwrap();
        let f = u.with_values(|_| 0.0);
        assert!(matches!(
            abp_check(&u, &f, 1.0, 1.0, 0.0),
            Err(Error::Precondition(_))
        ));
    }
}
