use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigalign::alignment::{binary_cost_matrix, count_swap_events, real_cost_matrix};
use rigalign::bits::and_count;
use rigalign::{align_features, align_linear, lap_solve, BitMatrix, CostMatrix, DenoisedFeatures, Permutation, RealMatrix};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimum and the number of permutations attaining it.
fn brute_force<C: Copy + PartialOrd + std::iter::Sum>(
    n: usize,
    cost: impl Fn(usize, usize) -> C,
    perms: &[Vec<usize>],
) -> (C, usize) {
    let mut best: Option<C> = None;
    let mut ties = 0;
    for p in perms {
        let v: C = (0..n).map(|i| cost(i, p[i])).sum();
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => ties += 1,
            _ => {
                best = Some(v);
                ties = 1;
            }
        }
    }
    (best.unwrap(), ties)
}

fn random_int_matrix(rng: &mut ChaCha8Rng, n: usize, range: i64) -> CostMatrix<i64> {
    let data = (0..n * n).map(|_| rng.gen_range(0..range)).collect();
    CostMatrix::from_vec(n, n, data).unwrap()
}

fn random_real_matrix(rng: &mut ChaCha8Rng, n: usize) -> CostMatrix<f64> {
    let data = (0..n * n).map(|_| rng.gen_range(-50.0..50.0)).collect();
    CostMatrix::from_vec(n, n, data).unwrap()
}

#[test]
fn lap_matches_brute_force_8x8_and_7x7() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for n in [8usize, 7] {
        let perms = permutations(n);
        for k in 0..100 {
            // Alternate between tie-heavy integers, wide integers and reals.
            match k % 3 {
                0 => {
                    let c = random_int_matrix(&mut rng, n, 4);
                    let (perm, obj) = lap_solve(&c);
                    assert_eq!(obj, brute_force(n, |i, j| c.get(i, j), &perms).0);
                    assert_eq!(c.objective(&perm), obj);
                }
                1 => {
                    let c = random_int_matrix(&mut rng, n, 1_000_000);
                    let (perm, obj) = lap_solve(&c);
                    assert_eq!(obj, brute_force(n, |i, j| c.get(i, j), &perms).0);
                    assert_eq!(c.objective(&perm), obj);
                }
                _ => {
                    let c = random_real_matrix(&mut rng, n);
                    let (perm, obj) = lap_solve(&c);
                    let best = brute_force(n, |i, j| c.get(i, j), &perms).0;
                    assert!((obj - best).abs() <= 1e-9 * best.abs().max(1.0), "{obj} vs {best}");
                    assert!((c.objective(&perm) - obj).abs() <= 1e-9 * obj.abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn lap_handles_degenerate_structure() {
    let perms = permutations(6);
    // Rank-one costs c(i,j) = a_i * b_j, where many assignments tie.
    let a = [1i64, 2, 2, 3, 3, 3];
    let b = [5i64, 5, 1, 0, 2, 2];
    let c = CostMatrix::from_fn(6, |i, j| a[i] * b[j]).unwrap();
    let (perm, obj) = lap_solve(&c);
    assert_eq!(obj, brute_force(6, |i, j| c.get(i, j), &perms).0);
    assert_eq!(c.objective(&perm), obj);
    // Constant matrix.
    let c = CostMatrix::from_fn(6, |_, _| 7i64).unwrap();
    assert_eq!(lap_solve(&c).1, 42);
}

#[test]
fn lap_is_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let perms = permutations(7);
    let mut unique_seen = 0;
    for _ in 0..60 {
        let n = 7;
        let c = random_int_matrix(&mut rng, n, 1000);
        let (p0, o0) = lap_solve(&c);
        let row = rng.gen_range(0..n);
        let col = rng.gen_range(0..n);
        let (dr, dc) = (rng.gen_range(-500..500i64), rng.gen_range(-500..500i64));
        let shifted = CostMatrix::from_fn(n, |i, j| {
            c.get(i, j) + if i == row { dr } else { 0 } + if j == col { dc } else { 0 }
        })
        .unwrap();
        let (p1, o1) = lap_solve(&shifted);
        assert_eq!(o1, o0 + dr + dc);
        assert_eq!(c.objective(&p1), o0);

        let k = rng.gen_range(-1000..1000i64);
        let plus = CostMatrix::from_fn(n, |i, j| c.get(i, j) + k).unwrap();
        let (p2, o2) = lap_solve(&plus);
        assert_eq!(o2, o0 + k * n as i64);
        if brute_force(n, |i, j| c.get(i, j), &perms).1 == 1 {
            unique_seen += 1;
            assert_eq!(p1, p0);
            assert_eq!(p2, p0);
        }
    }
    assert!(unique_seen > 30);
}

#[test]
fn lap_rejects_bad_input() {
    assert!(CostMatrix::<f64>::from_vec(2, 3, vec![0.0; 6]).is_err());
    assert!(CostMatrix::from_vec(2, 2, vec![0.0, f64::NAN, 1.0, 2.0]).is_err());
    assert!(CostMatrix::from_vec(2, 2, vec![0.0, f64::INFINITY, 1.0, 2.0]).is_err());
    assert!(CostMatrix::<i64>::from_vec(2, 2, vec![0; 3]).is_err());
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize, d: usize, p: f64) -> BitMatrix {
    BitMatrix::from_fn(n, d, |_, _| rng.gen::<f64>() < p)
}

#[test]
fn align_features_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let perms = permutations(7);
    for _ in 0..30 {
        let a = random_bits(&mut rng, 7, 12, 0.3);
        let b = random_bits(&mut rng, 7, 12, 0.3);
        let res = align_features(&DenoisedFeatures::new(a.clone()), &DenoisedFeatures::new(b.clone())).unwrap();
        let c = binary_cost_matrix(&a, &b).unwrap();
        let best = brute_force(7, |i, j| c.get(i, j), &perms).0;
        assert_eq!(res.objective, best as f64);

        // Distance form equals norm-plus-inner-product form, in integers.
        let dist: i64 = (0..7).map(|i| c.get(i, res.perm.apply(i))).sum();
        let na: i64 = (0..7).map(|i| a.row_count(i) as i64).sum();
        let nb: i64 = (0..7).map(|i| b.row_count(i) as i64).sum();
        let inner: i64 = (0..7)
            .map(|i| and_count(a.row(i), b.row(res.perm.apply(i))) as i64)
            .sum();
        assert_eq!(dist, na + nb - 2 * inner);
    }
}

#[test]
fn align_features_recovers_distinct_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = random_bits(&mut rng, 40, 64, 0.5);
    let pi = Permutation::random(40, &mut rng);
    let zp = z.scatter_rows(pi.as_slice());
    let mut res = align_features(&DenoisedFeatures::new(z), &DenoisedFeatures::new(zp)).unwrap();
    assert_eq!(res.objective, 0.0);
    assert_eq!(res.score(&pi).unwrap(), 0.0);
    assert_eq!(res.perm, pi);
}

#[test]
fn align_features_with_identical_rows() {
    // Row 3 repeats row 1; the others are distinct.
    let z = BitMatrix::from_fn(5, 8, |i, k| {
        let r = if i == 3 { 1 } else { i };
        k == r || k == 7
    });
    let pi = Permutation::new(vec![2, 4, 0, 1, 3]).unwrap();
    let zp = z.scatter_rows(pi.as_slice());
    let res = align_features(&DenoisedFeatures::new(z), &DenoisedFeatures::new(zp)).unwrap();
    assert_eq!(res.objective, 0.0);
    for i in [0usize, 2, 4] {
        assert_eq!(res.perm.apply(i), pi.apply(i));
    }
    let mut pair = [res.perm.apply(1), res.perm.apply(3)];
    pair.sort();
    let mut expect = [pi.apply(1), pi.apply(3)];
    expect.sort();
    assert_eq!(pair, expect);
}

#[test]
fn align_linear_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let perms = permutations(6);
    for _ in 0..30 {
        let y = RealMatrix::from_vec(6, 5, (0..30).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        let yp = RealMatrix::from_vec(6, 5, (0..30).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        let res = align_linear(&y, &yp).unwrap();
        let direct = |i: usize, j: usize| -> f64 {
            y.row(i).iter().zip(yp.row(j)).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        let best = brute_force(6, direct, &perms).0;
        assert!((res.objective - best).abs() <= 1e-9 * best.max(1.0));
        let c = real_cost_matrix(&y, &yp).unwrap();
        assert!((c.objective(&res.perm) - res.objective).abs() <= 1e-9 * best.max(1.0));
    }
}

#[test]
fn align_linear_noiseless_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = random_bits(&mut rng, 60, 100, 0.1);
    let y = RealMatrix::from_bits(&x);
    let pi = Permutation::random(60, &mut rng);
    let yp = y.scatter_rows(pi.as_slice());
    let mut res = align_linear(&y, &yp).unwrap();
    assert_eq!(res.objective, 0.0);
    assert_eq!(res.score(&pi).unwrap(), 0.0);
}

#[test]
fn align_rejects_shape_mismatch() {
    let a = DenoisedFeatures::new(BitMatrix::zeros(3, 4));
    let b = DenoisedFeatures::new(BitMatrix::zeros(3, 5));
    assert!(align_features(&a, &b).is_err());
    assert!(align_linear(&RealMatrix::zeros(2, 2), &RealMatrix::zeros(3, 2)).is_err());
}

#[test]
fn swap_event_implies_alternative_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let perms = permutations(7);
    let mut with_swaps = 0;
    for _ in 0..200 {
        // Few coordinates make coincidences and swaps common.
        let a = random_bits(&mut rng, 7, 4, 0.4);
        let b = random_bits(&mut rng, 7, 4, 0.4);
        let swaps = count_swap_events(&a, &b, None, 0).unwrap();
        assert_eq!(swaps.pairs_examined, 21);
        if swaps.count == 0 {
            continue;
        }
        with_swaps += 1;
        // Rows are index-aligned, so the truth is the identity.
        let c = binary_cost_matrix(&a, &b).unwrap();
        let best = brute_force(7, |i, j| c.get(i, j), &perms).0;
        let other_optimum = perms.iter().any(|p| {
            p.iter().enumerate().any(|(i, &j)| i != j) && (0..7).map(|i| c.get(i, p[i])).sum::<i64>() == best
        });
        assert!(other_optimum);
    }
    assert!(with_swaps > 20);
}

#[test]
fn swap_events_boundary_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut a = random_bits(&mut rng, 30, 128, 0.5);
    assert_eq!(count_swap_events(&a, &a, None, 0).unwrap().count, 0);
    for k in 0..128 {
        let v = a.get(4, k);
        a.set(9, k, v);
    }
    let r = count_swap_events(&a, &a, None, 0).unwrap();
    assert_eq!(r.count, 1);
    let sampled = count_swap_events(&a, &a, Some(5000), 7).unwrap();
    assert_eq!(sampled.pairs_examined, 5000);
    assert!(sampled.count < 60);
}
