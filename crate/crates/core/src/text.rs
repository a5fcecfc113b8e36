/// Comparison key for labels, definitions, and option texts: trimmed and case-folded.
pub fn normalize(text: &str) -> String {
    text.trim().to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_and_trims() {
        assert_eq!(normalize("  Research Acumen \n"), "research acumen");
        assert_eq!(normalize("research acumen"), normalize("RESEARCH ACUMEN"));
    }

    #[test]
    fn keeps_inner_whitespace() {
        assert_ne!(normalize("research  acumen"), normalize("research acumen"));
    }
}
