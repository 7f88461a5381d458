#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(report) = pellip_cli::parse_report(text) {
            // nonempty reports render in both formats
            if !report.rows.is_empty() {
                report.to_csv().expect("parsed report renders as csv");
                let json = report.to_json().expect("parsed report renders as json");
                pellip_cli::parse_report(&json).expect("rendered report reparses");
            }
        }
    }
});
