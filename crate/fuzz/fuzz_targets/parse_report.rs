#![no_main]
use libfuzzer_sys::fuzz_target;

use eigpert_cli::document::ReportDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = ReportDocument::parse(text) {
        let out = report.to_json();
        let again = ReportDocument::parse(&out).expect("serialized report parses");
        assert_eq!(report, again);
        assert_eq!(out, again.to_json());
    }
});
