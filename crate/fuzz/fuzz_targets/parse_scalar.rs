#![no_main]

use libfuzzer_sys::fuzz_target;
use purkit::dsl;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let vars: Vec<String> = ["x1", "x2", "x3"].map(String::from).to_vec();
    let _ = dsl::parse_scalar(src, &vars);
});
