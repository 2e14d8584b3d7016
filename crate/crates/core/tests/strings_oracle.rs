use fosuccinct::evaluator::{eval_fo, Assignment};
use fosuccinct::families::{
    build_vh_wh, decode_mu, ell, gen_vh_plus, mu_len, mu_letters, v_len, TowerStrings,
};
use fosuccinct::formula::dotted_alphabet;
use fosuccinct::{Formula, Guards, LabeledString, Letter, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn letters(text: &str) -> Vec<Letter> {
    text.split_whitespace().map(|w| w.parse().unwrap()).collect()
}

/// `s` is one or more back-to-back copies of `v`.
fn is_power(s: &[Letter], v: &[Letter]) -> bool {
    !s.is_empty() && s.len().is_multiple_of(v.len()) && s.chunks(v.len()).all(|c| c == v)
}

fn holds(f: &Formula, h: u32, s: &[Letter]) -> bool {
    let w = LabeledString::new(h, s.to_vec()).unwrap();
    eval_fo(f, &Structure::String(w), &Assignment::new()).unwrap()
}

fn mutate(rng: &mut ChaCha8Rng, s: &mut Vec<Letter>, alphabet: &[Letter]) {
    let p = rng.gen_range(0..s.len());
    let l = alphabet[rng.gen_range(0..alphabet.len())];
    match rng.gen_range(0..4) {
        0 => s[p] = l,
        1 if s.len() > 1 => {
            s.remove(p);
        }
        2 => s.insert(p, l),
        _ => {
            let q = rng.gen_range(0..s.len());
            s.swap(p, q);
        }
    }
}

#[test]
fn constants_at_height_one() {
    // v_1 = T2 μ_1(0) dot μ_1(1) dot E2 with μ_1(0) = T1 E1 and μ_1(1) = T1 0 E1:
    // 1 + 2 + 1 + 3 + 1 + 1 = 9 letters; w_1 has 2^Tower(1) = 4 copies, so 36
    // letters and largest position 35.
    let TowerStrings { v, w } = build_vh_wh(1, &Guards::default()).unwrap();
    assert_eq!(v.letters, letters("T2 T1 E1 dot T1 0 E1 dot E2"));
    assert_eq!(v.len(), 9);
    assert_eq!(w.len(), 36);
    assert_eq!(ell(1), Some(35));
    assert_eq!(v_len(1), Some(9));
}

#[test]
fn mu_round_trips() {
    for h in 1..=2 {
        for n in 0..=64u64 {
            let s = mu_letters(h, n).unwrap();
            assert_eq!(s.len() as u128, mu_len(h, n));
            assert_eq!(decode_mu(h, &s).unwrap(), (n, s.len()), "h={h} n={n}");
            let mut twice = s.clone();
            twice.extend(mu_letters(h, n + 1).unwrap());
            assert_eq!(decode_mu(h, &twice).unwrap(), (n, s.len()));
        }
    }
    // bits 0 0 would encode 1 with a non-canonical length
    assert!(decode_mu(1, &letters("T1 0 0 E1")).is_err());
    assert!(decode_mu(2, &letters("T2 T1 E1 1 T1 E1 0 E2")).is_err());
    assert!(decode_mu(1, &letters("T1 0")).is_err());
}

#[test]
fn vh_plus_matches_string_matcher() {
    let f = gen_vh_plus(1).unwrap();
    let v = letters("T2 T1 E1 dot T1 0 E1 dot E2");
    let alphabet = dotted_alphabet(1);
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let (mut yes, mut no) = (0, 0);
    for k in 0..200 {
        let s: Vec<Letter> = if k % 2 == 0 {
            let mut s = v.repeat(rng.gen_range(1..=5));
            for _ in 0..rng.gen_range(0..=2) {
                mutate(&mut rng, &mut s, &alphabet);
            }
            s
        } else {
            let len = rng.gen_range(1..=40);
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
        };
        let want = is_power(&s, &v);
        assert_eq!(holds(&f, 1, &s), want, "{s:?}");
        if want {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes >= 20 && no >= 20, "{yes} positive, {no} negative");
}

#[test]
fn vh_plus_at_height_two() {
    let g = Guards::default();
    let f = gen_vh_plus(2).unwrap();
    let v = build_vh_wh(2, &g).unwrap().v.letters;
    let alphabet = dotted_alphabet(2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..24 {
        let mut s = v.repeat(1 + k % 2);
        for _ in 0..(k % 3) {
            mutate(&mut rng, &mut s, &alphabet);
        }
        assert_eq!(holds(&f, 2, &s), is_power(&s, &v), "case {k}");
    }
}
