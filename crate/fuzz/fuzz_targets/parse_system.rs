#![no_main]

use libfuzzer_sys::fuzz_target;
use purkit::dsl;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(f) = dsl::parse(src) else { return };
    // printing must round-trip
    let printed = dsl::print(&f);
    let again = dsl::parse(&printed).expect("printed system reparses");
    assert_eq!(dsl::print(&again), printed);
});
