#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = pellip_cli::parse_spec(text) {
            // accepted specs must survive a write and reparse
            let again = pellip_cli::parse_spec(&pellip_cli::write_spec(&spec)).expect("written spec reparses");
            assert_eq!(again.matrices().len(), spec.matrices().len());
        }
    }
});
