use gapedit::access::{MeteredString, RandomStream};
use gapedit::harness::{exact_gap_leaf, exact_shifted_leaf, generate, Family, InstanceSpec, Side};
use gapedit::reductions::{ao_reduce, gap_to_shifted, multilevel_reduce};
use gapedit::{Constants, GapInstance, Truth, Verdict};

const ONE_OVER_E: f64 = 0.367_879_441_171_442_3;

fn pair(family: Family, side: Side, n: usize, k: usize, core_scale: usize, seed: u64) -> (MeteredString, MeteredString, gapedit::harness::DistanceBounds) {
    let g = generate(&InstanceSpec {
        family,
        side,
        n,
        k,
        alphabet_size: 4,
        core_scale,
        seed,
    })
    .unwrap();
    (MeteredString::new(g.x), MeteredString::new(g.y), g.bounds)
}

/// Fraction of NO instances answered YES, and number of YES instances
/// answered NO, over `trials` pairs of each kind.
fn rates(
    family: Family,
    n: usize,
    alpha: usize,
    beta: usize,
    trials: u64,
    run: impl Fn(&GapInstance<gapedit::MeteredView<'_>>, &mut RandomStream) -> Verdict,
) -> (f64, usize) {
    let (mut false_yes, mut false_no) = (0, 0);
    for t in 0..trials {
        for side in [Side::Far, Side::Near] {
            let k = if side == Side::Far { alpha + 1 } else { beta };
            let (x, y, bounds) = pair(family, side, n, k, alpha, 2 * t + (side == Side::Near) as u64);
            let inst = GapInstance::new(x.view(), y.view(), alpha, beta).unwrap();
            let v = run(&inst, &mut RandomStream::new(t).child(7));
            match bounds.truth(alpha, beta) {
                Truth::No => false_yes += usize::from(v.is_yes()),
                Truth::Yes => false_no += usize::from(!v.is_yes()),
                Truth::Gap => panic!("planted pair in the gap"),
            }
        }
    }
    (false_yes as f64 / trials as f64, false_no)
}

#[test]
fn ao_reduce_error_is_one_sided_and_bounded() {
    let (no_err, yes_err) = rates(Family::RandomEdits, 2048, 96, 2, 150, |inst, rs| {
        ao_reduce(inst, inst.beta, rs, |_, sub| exact_gap_leaf(sub)).unwrap().verdict
    });
    assert_eq!(yes_err, 0);
    assert!(no_err <= ONE_OVER_E + 0.1, "false-YES rate {no_err}");
}

#[test]
fn multilevel_on_padded_cores() {
    let (no_err, yes_err) = rates(Family::PaddedHard, 2048, 40, 4, 150, |inst, rs| {
        multilevel_reduce(inst, inst.beta, rs, |_, sub| exact_gap_leaf(sub)).unwrap().verdict
    });
    assert_eq!(yes_err, 0);
    assert!(no_err <= ONE_OVER_E + 0.1, "false-YES rate {no_err}");
}

#[test]
fn gap_to_shifted_both_sides() {
    let c = Constants::default();
    let (no_err, yes_err) = rates(Family::RandomEdits, 1 << 13, 2048, 1, 100, |inst, rs| {
        gap_to_shifted(inst, inst.beta, &c, rs, |_, sub| exact_shifted_leaf(sub)).unwrap().verdict
    });
    assert!(no_err <= ONE_OVER_E + 0.1, "false-YES rate {no_err}");
    assert!(yes_err as f64 / 100.0 <= ONE_OVER_E + 0.1, "false-NO count {yes_err}");
}

#[test]
fn call_lists_do_not_depend_on_content() {
    let c = Constants::default();
    let (x1, y1, _) = pair(Family::RandomEdits, Side::Near, 4096, 3, 1, 1);
    let (x2, y2, _) = pair(Family::Unrelated, Side::Far, 4096, 0, 1, 2);
    let a = GapInstance::new(x1.view(), y1.view(), 2048, 1).unwrap();
    let b = GapInstance::new(x2.view(), y2.view(), 2048, 1).unwrap();
    let calls = |inst: &GapInstance<_>| {
        gap_to_shifted(inst, 1, &c, &mut RandomStream::new(5), |_, sub| exact_shifted_leaf(sub))
            .unwrap()
            .calls
            .into_iter()
            .map(|(call, _)| call)
            .collect::<Vec<_>>()
    };
    assert_eq!(calls(&a), calls(&b));
}
