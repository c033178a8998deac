//! Table of reference constants against recomputed values.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds;
use crate::free_algebra::{q, Q};
use crate::gl2;
use crate::lie_min;
use crate::magnus_core;
use crate::tolerances::Tolerances;
use crate::Result;

pub const GROUPS: [&str; 5] = ["combinatorics", "lie-min", "bounds", "gl2", "examples"];

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub group: String,
    pub constant: String,
    pub reference: String,
    pub computed: String,
    pub tol: String,
    pub pass: bool,
}

fn exact(group: &str, name: &str, reference: Q, computed: Q) -> Row {
    Row {
        group: group.into(),
        constant: name.into(),
        pass: reference == computed,
        reference: reference.to_string(),
        computed: computed.to_string(),
        tol: "exact".into(),
    }
}

fn approx(group: &str, name: &str, reference: f64, computed: f64, tol: f64) -> Row {
    Row {
        group: group.into(),
        constant: name.into(),
        pass: (reference - computed).abs() <= tol,
        reference: format!("{reference}"),
        computed: format!("{computed:.10}"),
        tol: format!("{tol:e}"),
    }
}

fn relative(group: &str, name: &str, reference: f64, computed: f64, tol: f64) -> Row {
    Row {
        group: group.into(),
        constant: name.into(),
        pass: ((reference - computed) / reference).abs() <= tol,
        reference: format!("{reference}"),
        computed: format!("{computed:.10}"),
        tol: format!("{tol:e} rel"),
    }
}

fn combinatorics() -> Result<Vec<Row>> {
    let g = "combinatorics";
    let want = [q(1, 1), q(1, 2), q(2, 9), q(7, 72), q(13, 300)];
    Ok(want
        .iter()
        .enumerate()
        .map(|(i, w)| exact(g, &format!("theta_{}", i + 1), w.clone(), magnus_core::theta_coefficient(i + 1)))
        .collect())
}

fn lie() -> Result<Vec<Row>> {
    let g = "lie-min";
    let want = [(2, q(1, 4)), (3, q(1, 18)), (4, q(1, 72)), (5, q(1, 300)), (6, q(37, 43200))];
    let mut rows = Vec::new();
    for (k, w) in want {
        let p = lie_min::theta_lie(k)?;
        let mut row = exact(g, &format!("theta_lie_{k}"), w, p.theta_lie());
        row.pass &= lie_min::verify_dual(&p)?;
        rows.push(row);
    }
    Ok(rows)
}

fn bounds_rows(t: &Tolerances) -> Result<Vec<Row>> {
    let g = "bounds";
    let mut rows = vec![
        approx(g, "delta", 2.1737374, bounds::delta_standard(), t.get("delta")),
        approx(g, "c1", 2.7014, bounds::c1().1, t.get("c1")),
        approx(g, "delta_plus_lhat", 2.1811375, bounds::delta_plus_lhat(), t.get("delta_plus_lhat")),
        approx(g, "delta2", 2.281, bounds::method2_radius()?, t.get("delta2")),
        approx(g, "h_pi", -2.513, bounds::h_pi(), t.get("h_pi")),
    ];
    for (name, reference, key) in
        [("method1", 2.2762, "method1"), ("method3", 2.204, "method3"), ("method4", 2.297, "method4"), ("method5", 2.293, "method5")]
    {
        let sys = bounds::IvpSystem::builtin(name).expect("builtin system");
        rows.push(approx(g, name, reference, bounds::blowup_radius(&sys)?.radius, t.get(key)));
    }
    let psi = bounds::psi_series(6);
    for (i, w) in [q(1, 4), q(5, 72), q(11, 576), q(479, 86400), q(1769, 1036800)].into_iter().enumerate() {
        rows.push(exact(g, &format!("psi_{}", i + 2), w, psi.coeff(i + 2)));
    }
    Ok(rows)
}

fn gl2_rows(t: &Tolerances) -> Result<Vec<Row>> {
    let g = "gl2";
    let (_, z) = gl2::z_matrix()?;
    Ok(vec![approx(g, "mp_z", 4.493, gl2::magnus_exponent(&z)?, t.get("mp_z"))])
}

fn example_rows(t: &Tolerances) -> Result<Vec<Row>> {
    let g = "examples";
    let rel = t.get("fit_constant_rel");
    let mut rows = Vec::new();
    for (name, reference) in [
        ("skew-loxodromic", 4.001),
        ("skew-loxodromic-ridge", 4.356),
        ("critical", 2f64.sqrt() * PI.powf(1.5)),
        ("parabolic", 2f64.sqrt() * PI.powf(1.5)),
        ("hyperbolic", 2f64.sqrt() * PI.powf(1.5)),
    ] {
        let tab = gl2::example_asymptotics(name)?;
        rows.push(relative(g, &format!("{name}_constant"), reference, tab.constant, rel));
        rows.push(approx(g, &format!("{name}_exponent"), tab.expected_exponent, tab.exponent, t.get("fit_exponent")));
    }
    rows.push(approx(g, "critical_mu2", PI / 2.0, gl2::critical_term_norm(2), 1e-15));
    let n = 400;
    let scaled = gl2::critical_term_norm(n) * (n as f64 / (2.0 * PI)).sqrt();
    rows.push(approx(g, "critical_sqrt_asymptotic_400", 1.0, scaled, t.get("critical_asymptotic_rel")));
    Ok(rows)
}

/// All rows, or those of one group.
pub fn reproduce(only: Option<&str>, t: &Tolerances) -> Result<Vec<Row>> {
    if let Some(g) = only {
        if !GROUPS.contains(&g) {
            return Err(crate::Error::Usage(format!("unknown group {g:?}; expected one of {}", GROUPS.join(", "))));
        }
    }
    let want = |g: &str| only.is_none_or(|o| o == g);
    let mut rows = Vec::new();
    if want("combinatorics") {
        rows.extend(combinatorics()?);
    }
    if want("lie-min") {
        rows.extend(lie()?);
    }
    if want("bounds") {
        rows.extend(bounds_rows(t)?);
    }
    if want("gl2") {
        rows.extend(gl2_rows(t)?);
    }
    if want("examples") {
        rows.extend(example_rows(t)?);
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut s = String::from("constant,reference,computed,tol,pass\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.constant, r.reference, r.computed, r.tol, r.pass));
    }
    s
}
