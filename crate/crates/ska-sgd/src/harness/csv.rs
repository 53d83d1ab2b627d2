//! CSV output: RFC-4180-style quoting, shortest round-trip float
//! formatting, LF line endings.

use crate::error::{Error, Result};
use crate::optim::TrialRecord;
use std::io::Write;
use std::path::Path;

/// Header of every per-trial records file.
pub const RECORD_HEADER: &str = "experiment,optimizer,seed,iter,loss,grad_norm,err_norm,obj_gap,wall_ns";

/// Header of the aggregate file. `std` is the population standard
/// deviation (divide by N) matching ±1-std bands.
pub const AGGREGATE_HEADER: &str = "experiment,optimizer,iter,metric,mean,std,min,max,n";

/// Quote a field when it contains a comma, quote, or newline.
fn field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest decimal that round-trips the exact f64 value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Render one trial as CSV text.
pub fn trial_csv(experiment: &str, trial: &TrialRecord) -> String {
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for r in &trial.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            field(experiment),
            field(&trial.optimizer),
            trial.seed,
            r.iter,
            fmt_f64(r.loss),
            fmt_f64(r.grad_norm),
            fmt_f64(r.err_norm),
            fmt_f64(r.obj_gap),
            r.wall_ns,
        ));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::StepRecord;
    use proptest::prelude::*;

    fn one_trial() -> TrialRecord {
        TrialRecord {
            optimizer: "sgd".into(),
            seed: 7,
            records: vec![StepRecord {
                iter: 10,
                loss: 0.25,
                grad_norm: 1.5,
                err_norm: 0.5,
                obj_gap: 0.125,
                wall_ns: 42,
            }],
            diverged: false,
            total_wall_ns: 100,
        }
    }

    #[test]
    fn header_is_exact() {
        let text = trial_csv("exp", &one_trial());
        assert!(text.starts_with(
            "experiment,optimizer,seed,iter,loss,grad_norm,err_norm,obj_gap,wall_ns\n"
        ));
    }

    #[test]
    fn empty_record_list_gives_header_only() {
        let mut t = one_trial();
        t.records.clear();
        let text = trial_csv("exp", &t);
        assert_eq!(text, format!("{RECORD_HEADER}\n"));
    }

    #[test]
    fn fields_needing_quotes_are_quoted() {
        assert_eq!(field("plain"), "plain");
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    proptest! {
        #[test]
        fn floats_round_trip_bitwise(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
