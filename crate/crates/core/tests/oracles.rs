//! Values frozen from an independent exact-rational prototype.

use modcong::expansion::expand_entry;
use modcong::modforms::{EntryId, Registry};
use modcong::sequences::{closed_form_range, ClosedFormId};
use num_bigint::BigInt;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn expand(id: EntryId, n: usize) -> Vec<BigInt> {
    expand_entry(Registry::builtin().get(id), n).unwrap().integers().unwrap()
}

#[test]
fn signed_sequences() {
    assert_eq!(expand(EntryId::Iii, 3), ints(&[1, -5, 35, -275]));
    assert_eq!(expand(EntryId::Vii, 5), ints(&[1, 3, 9, 21, 9, -297]));
    assert_eq!(expand(EntryId::Xii, 3), ints(&[1, -4, 28, -256]));
    assert_eq!(expand(EntryId::Xiii, 4), ints(&[1, -3, 9, -3, -279]));
}

#[test]
fn closed_forms_match_expansions_beyond_the_acceptance_range() {
    for id in [ClosedFormId::Vi, ClosedFormId::Xi, ClosedFormId::F2] {
        assert_eq!(closed_form_range(id, 60).unwrap(), expand(id.entry(), 60), "{id}");
    }
}

#[test]
fn expansion_json_shape() {
    let e = expand_entry(Registry::builtin().get(EntryId::F23), 4).unwrap();
    assert_eq!(
        e.to_json(),
        serde_json::json!({"entry": "f23", "maxN": 4, "coefficients": ["1", "2", "6", "26", "142"]})
    );
}
