//! Prints SNDR/ENOB and worst INL/DNL of the default spectrum test across
//! op-amp gains.

use adcsim_core::config::Resolved;
use adcsim_core::experiment::{run_linearity, run_spectrum};

fn main() -> adcsim_core::Result<()> {
    let ideal = Resolved::ideal();
    let base = run_spectrum(&ideal)?.report;
    println!("ideal      sndr={} enob={}", base.sndr_db, base.enob_bits);
    for gain_db in [30.0, 40.0, 50.0, 55.0, 60.0, 70.0, 80.0, 90.0, 100.0, 120.0] {
        let mut cfg = ideal.clone();
        cfg.adc = cfg.adc.map_stages(|s| s.with_gain_db(gain_db));
        let spec = run_spectrum(&cfg)?.report;
        let lin = run_linearity(&cfg)?;
        println!(
            "{gain_db:>5} dB  sndr={:.3} enob={:.4} sfdr={:.2}  worst_dnl={:.3} worst_inl={:.3} missing={}",
            spec.sndr_db.value().unwrap_or(f64::INFINITY),
            spec.enob_bits.value().unwrap_or(f64::INFINITY),
            spec.sfdr_db.value().unwrap_or(f64::INFINITY),
            lin.worst_dnl,
            lin.worst_inl,
            lin.missing_codes.len()
        );
    }
    Ok(())
}
