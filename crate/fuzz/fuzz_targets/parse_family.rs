#![no_main]
use libfuzzer_sys::fuzz_target;

use eigpert_cli::document::FamilyDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = FamilyDocument::parse(text) {
        let family = doc.to_family().expect("validated document builds a family");
        assert_eq!(family.dim(), doc.dimension);
        let again = FamilyDocument::parse(&doc.to_json()).expect("serialized document parses");
        assert_eq!(doc, again);
    }
});
