#![no_main]

use libfuzzer_sys::fuzz_target;
use purkit::report::Report;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<Report>(data) {
        let back: Report = serde_json::from_str(&r.to_json()).expect("serialized report reparses");
        assert_eq!(back, r);
    }
});
