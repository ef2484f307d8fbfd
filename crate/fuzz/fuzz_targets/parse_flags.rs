#![no_main]
use libfuzzer_sys::fuzz_target;

use clap::Parser;
use eigpert_cli::args::{self, Cli};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = args::parse_selector(text);
    let _ = args::parse_scheme(text);
    let _ = args::parse_complex(text);
    if let Ok(l) = args::parse_steps(text) {
        assert!(l.0.windows(2).all(|w| w[1] < w[0]));
        assert!(l.0.len() <= args::MAX_LADDER);
    }
    if let Ok(g) = args::parse_grid(text) {
        assert!(g.0.iter().all(|t| *t > 0.0 && t.is_finite()));
    }
    let argv = std::iter::once("eigpert").chain(text.split_whitespace());
    let _ = Cli::try_parse_from(argv);
});
