//! Log-log slope of the scheme B infidelity against ε, and of the scheme A
//! infidelity against |τ|².

use fockswap::protocols::{run_scheme_a, run_scheme_b, SchemeAParams, SchemeBParams};

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    cov / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

fn main() -> fockswap::Result<()> {
    let mut b = Vec::new();
    for eps in [0.3, 0.1, 0.03, 0.01] {
        let f = run_scheme_b(SchemeBParams::new(eps, 1.0))?.events[0].fidelity_psi_plus;
        b.push((eps, 1.0 - f));
    }
    println!("scheme B: 1-F ~ epsilon^{:.4}", slope(&b));

    let mut a = Vec::new();
    for tau2 in [1e-4, 1e-3, 1e-2] {
        let f = run_scheme_a(SchemeAParams::from_tau2(tau2, 1.0, 1))?.events[0].fidelity_psi_plus;
        a.push((tau2, 1.0 - f));
    }
    println!("scheme A: 1-F ~ (|tau|^2)^{:.4}", slope(&a));
    Ok(())
}
