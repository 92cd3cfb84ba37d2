//! Plain-text certificate reports.

use std::fmt::Write;

use crate::contraction::{ContractionCertificate, TransverseCertificate};

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Report for a constant-metric certificate, listing the Jacobian spectrum.
pub fn contraction_report(cert: &ContractionCertificate, eigenvalues: &[(f64, f64)]) -> String {
    let mut s = String::new();
    let spectrum: Vec<String> = eigenvalues
        .iter()
        .map(|&(re, im)| {
            if im == 0.0 {
                format!("{re:.6}")
            } else {
                format!("{re:.6}{im:+.6}i")
            }
        })
        .collect();
    writeln!(s, "jacobian eigenvalues: {}", spectrum.join(", ")).unwrap();
    write_common(&mut s, cert);
    s
}

pub fn transverse_report(cert: &TransverseCertificate) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "hopf oscillator: gamma = {}, tau_r = {}, epsilon = {}",
        cert.gamma, cert.tau_r, cert.epsilon
    )
    .unwrap();
    write_common(&mut s, &cert.certificate);
    writeln!(s, "max orthogonality residual: {:.3e}", cert.max_orthogonality_residual).unwrap();
    writeln!(s, "min metric eigenvalue: {:.6e}", cert.min_metric_eigenvalue).unwrap();
    let rate = cert.certificate.rate;
    let claim = cert.claimed_rate;
    writeln!(
        s,
        "claimed rate 4*eps^2 = {claim:.6} vs certified {rate:.6} ({})",
        if rate >= claim {
            "claim certified"
        } else {
            "claim not certified on this grid"
        }
    )
    .unwrap();
    s
}

fn write_common(s: &mut String, cert: &ContractionCertificate) {
    writeln!(s, "region: {}", cert.region).unwrap();
    writeln!(s, "metric: {}", cert.metric).unwrap();
    writeln!(s, "samples: {}", cert.samples).unwrap();
    writeln!(s, "rate (lambda): {:.12}", cert.rate).unwrap();
    writeln!(
        s,
        "worst residual: {:.6e} at {:?}",
        cert.worst_residual, cert.worst_sample
    )
    .unwrap();
    writeln!(s, "verdict: {}", verdict(cert.pass)).unwrap();
}
