use mfcollab_arxiv::record::*;
use mfcollab_arxiv::stats::yearly_indices;
use mfcollab_arxiv::Discipline;
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    "[A-Z][a-z]{0,6}( [A-Z]\\.)?( [A-Z][a-z]{1,8})"
}

fn record() -> impl Strategy<Value = PaperRecord> {
    (
        2007u16..2099,
        1u8..=12,
        1u32..99_999,
        prop::collection::vec("(cs|math|hep-th|cond-mat)\\.[A-Z]{2}", 1..3),
        prop::collection::vec(name(), 1..6),
    )
        .prop_map(|(y, m, seq, cats, authors)| {
            let id = format!("{:02}{m:02}.{seq:05}", y % 100);
            PaperRecord::new(&id, cats, authors).unwrap()
        })
}

proptest! {
    #[test]
    fn new_style_ids_round_trip(y in 2007u16..2099, m in 1u8..=12, seq in 0u32..99_999, v in 0u8..5) {
        let suffix = if v == 0 { String::new() } else { format!("v{v}") };
        let id = format!("{:02}{m:02}.{seq:05}{suffix}", y % 100);
        prop_assert_eq!(parse_year_month(&id).unwrap(), YearMonth { year: y, month: m });
    }

    #[test]
    fn old_style_ids_round_trip(y in 1991u16..2007, m in 1u8..=12, seq in 0u32..999) {
        let id = format!("hep-th/{:02}{m:02}{seq:03}", y % 100);
        prop_assert_eq!(parse_year_month(&id).unwrap(), YearMonth { year: y, month: m });
    }

    #[test]
    fn normalisation_is_idempotent(s in "[ A-Za-z.,]{0,30}") {
        let once = normalize_author(&s);
        prop_assert_eq!(normalize_author(&once), once.clone());
        prop_assert!(!once.starts_with(' ') && !once.ends_with(' ') && !once.contains("  "));
    }

    #[test]
    fn json_lines_round_trip(r in record()) {
        prop_assert_eq!(PaperRecord::from_json_line(&r.to_json_line()).unwrap(), r);
    }

    #[test]
    fn author_string_form_round_trips(names in prop::collection::vec(name(), 1..6)) {
        let joined = match names.len() {
            1 => names[0].clone(),
            n => format!("{} and {}", names[..n - 1].join(", "), names[n - 1]),
        };
        prop_assert_eq!(split_author_string(&joined), names);
    }

    #[test]
    fn filter_keeps_any_match(r in record()) {
        let d = Discipline::parse("cs");
        prop_assert_eq!(d.matches(&r), r.categories.iter().any(|c| c.starts_with("cs.")));
    }

    #[test]
    fn yearly_indices_are_bounded(rs in prop::collection::vec(record(), 1..40)) {
        let rows = yearly_indices(&rs);
        prop_assert_eq!(rows.iter().map(|r| r.papers()).sum::<u64>(), rs.len() as u64);
        for row in rows {
            let [ci, dc, cc] = row.indices().map(Option::unwrap);
            prop_assert!((0.0..=1.0).contains(&dc) && cc <= dc && dc <= ci);
        }
    }
}
