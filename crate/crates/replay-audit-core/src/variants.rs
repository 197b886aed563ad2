//! Language-variant URL expansion.
//!
//! Sites that key the display language off a query parameter leave one
//! archived copy per language variant. Expanding a URI-R into its variant
//! forms lets the aggregator sweep all of them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Expand `uri_r` into itself plus one variant per language code, appended
/// as a query parameter. Order is preserved: base first, then the codes in
/// the order given.
pub fn expand_language_variants_with_param(
    uri_r: &str,
    param: &str,
    lang_codes: &[&str],
) -> Vec<String> {
    let mut out = Vec::with_capacity(1 + lang_codes.len());
    out.push(uri_r.to_string());
    // Fragments cannot appear in a URI-R that archives index; treat the
    // whole string as path + optional query.
    let separator = if uri_r.contains('?') { '&' } else { '?' };
    for code in lang_codes {
        out.push(format!("{uri_r}{separator}{param}={code}"));
    }
    out
}

/// [`expand_language_variants_with_param`] with the conventional `lang`
/// parameter.
pub fn expand_language_variants(uri_r: &str, lang_codes: &[&str]) -> Vec<String> {
    expand_language_variants_with_param(uri_r, "lang", lang_codes)
}
