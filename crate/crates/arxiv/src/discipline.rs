//! Category filters.
//!
//! A discipline is a list of patterns. A pattern `p` matches a category equal
//! to `p` or starting with `p.`; a pattern ending in `*` matches any category
//! with that prefix. `physics` is not a single arXiv archive, so the name maps
//! to [`PHYSICS_ARCHIVES`].

use crate::record::PaperRecord;

/// Archives counted as physics.
pub const PHYSICS_ARCHIVES: [&str; 7] =
    ["astro-ph", "cond-mat", "gr-qc", "hep-*", "nucl-*", "physics", "quant-ph"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discipline {
    patterns: Vec<String>,
}

impl Discipline {
    /// `physics` for the bundle, otherwise a comma-separated pattern list
    /// such as `cs` or `hep-*,gr-qc`.
    pub fn parse(spec: &str) -> Self {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("physics") {
            return Self::from_patterns(PHYSICS_ARCHIVES);
        }
        Self::from_patterns(spec.split(',').map(str::trim).filter(|p| !p.is_empty()))
    }

    pub fn from_patterns<S: AsRef<str>>(patterns: impl IntoIterator<Item = S>) -> Self {
        Self {
            patterns: patterns.into_iter().map(|p| p.as_ref().to_string()).collect(),
        }
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn matches_category(&self, category: &str) -> bool {
        self.patterns.iter().any(|p| match p.strip_suffix('*') {
            Some(prefix) => category.starts_with(prefix),
            None => {
                category == p
                    || category
                        .strip_prefix(p.as_str())
                        .is_some_and(|rest| rest.starts_with('.'))
            }
        })
    }

    /// Any category matches.
    pub fn matches(&self, record: &PaperRecord) -> bool {
        record.categories.iter().any(|c| self.matches_category(c))
    }
}

pub fn discipline_filter<'a, I>(records: I, discipline: &'a Discipline) -> impl Iterator<Item = I::Item> + 'a
where
    I: IntoIterator + 'a,
    I::Item: std::borrow::Borrow<PaperRecord>,
{
    use std::borrow::Borrow;
    records.into_iter().filter(move |r| discipline.matches(r.borrow()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(cats: &[&str]) -> PaperRecord {
        PaperRecord::new("0704.0001", cats.iter().map(|c| c.to_string()).collect(), vec!["A".into()]).unwrap()
    }

    #[test]
    fn prefixes() {
        let cs = Discipline::parse("cs");
        assert!(cs.matches(&rec(&["cs.LG"])));
        assert!(!cs.matches(&rec(&["math.PR"])));
        assert!(Discipline::parse("math").matches(&rec(&["cs.DS", "math.CO"])));
        assert!(!Discipline::parse("math").matches(&rec(&["math-ph"])));
        assert!(!cs.matches(&rec(&["csx.AB"])));
    }

    #[test]
    fn physics_bundle() {
        let phy = Discipline::parse("physics");
        for c in ["hep-th", "hep-ph", "nucl-ex", "astro-ph.GA", "cond-mat.stat-mech", "gr-qc", "quant-ph", "physics.optics"] {
            assert!(phy.matches(&rec(&[c])), "{c}");
        }
        assert!(!phy.matches(&rec(&["math-ph"])));
        assert!(!phy.matches(&rec(&["cs.LG"])));
        let kept: Vec<PaperRecord> = discipline_filter(vec![rec(&["cs.AI"]), rec(&["gr-qc"])], &phy).collect();
        assert_eq!(kept.len(), 1);
    }
}
