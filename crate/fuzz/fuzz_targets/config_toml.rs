#![no_main]

use fowt_dpim_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml(text) {
        // An accepted configuration survives a write/read cycle unchanged.
        let again = RunConfig::from_toml(&toml::to_string(&cfg).expect("serializes")).expect("reparses");
        assert_eq!(cfg, again);
    }
});
