use super::{BerRecord, BER_FLOOR};

fn ber_cell(ber: f64) -> String {
    if ber < BER_FLOOR {
        "<1e-7".into()
    } else {
        format!("{ber:.3e}")
    }
}

fn snr_label(snr: f64) -> String {
    if snr.fract() == 0.0 {
        format!("{snr:.0} dB")
    } else {
        format!("{snr} dB")
    }
}

/// Aligned text table: one row per detector, one BER column per SNR and a
/// final column with the detector's total detection time.
pub fn report(records: &[BerRecord]) -> String {
    if records.is_empty() {
        return "no records".into();
    }
    let mut detectors: Vec<&str> = Vec::new();
    let mut snrs: Vec<f64> = Vec::new();
    for r in records {
        if !detectors.contains(&r.detector.as_str()) {
            detectors.push(&r.detector);
        }
        if !snrs.iter().any(|s| s.to_bits() == r.snr_db.to_bits()) {
            snrs.push(r.snr_db);
        }
    }
    snrs.sort_by(f64::total_cmp);

    let mut header = vec!["detector".to_string()];
    header.extend(snrs.iter().map(|&s| snr_label(s)));
    header.push("time_ms".into());

    let mut rows = vec![header];
    for d in &detectors {
        let mut row = vec![d.to_string()];
        let mut time = 0.0;
        for &snr in &snrs {
            match records
                .iter()
                .find(|r| r.detector == *d && r.snr_db.to_bits() == snr.to_bits())
            {
                Some(r) => {
                    row.push(ber_cell(r.ber));
                    time += r.wall_time_ms;
                }
                None => row.push("-".into()),
            }
        }
        row.push(format!("{time:.3}"));
        rows.push(row);
    }

    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| {
                if c == 0 {
                    format!("{v:<w$}", w = widths[c])
                } else {
                    format!("{v:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if i == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (ncol - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}
