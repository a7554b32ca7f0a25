use madm::baselines::{place_side_by_side, solve_fixed_p};
use madm::channels::{ChannelSet, GridSpec, RisSpec};
use madm::numerics::norm_inf;
use madm::perfect::solve_perfect;
use madm::scenario::Scenario;
use madm::signal::{interference_power, secrecy_rate};
use madm::C64;

fn small(n_a: usize) -> Scenario {
    let mut s = Scenario::default();
    s.grid = GridSpec { nx: 5, nz: 5, spacing: s.wavelength() / 2.0 };
    s.ris = RisSpec { my: 8, mz: 8, eta: 1.5 };
    s.solver.n_a = n_a;
    s
}

fn power(w: &[C64]) -> f64 {
    w.iter().map(|x| x.norm_sqr()).sum()
}

#[test]
fn constraints_hold_at_the_solution() {
    for n_a in [1, 4, 9, 25] {
        let s = small(n_a);
        let ch = s.channels().unwrap();
        let prob = s.problem(&ch);
        let (st, rep) = solve_perfect(&prob).unwrap();
        assert!((power(&st.w) - s.solver.p0).abs() <= 1e-8 * s.solver.p0, "n_a {n_a}");
        assert!(norm_inf(&st.varpi) <= s.ris.eta * (1.0 + 1e-12));
        assert_eq!(st.w.iter().filter(|x| x.norm() > 0.0).count(), n_a);
        assert_eq!(st.p.iter().filter(|&&x| x).count(), n_a);
        for (x, &on) in st.w.iter().zip(&st.p) {
            assert!(on || *x == C64::new(0.0, 0.0));
        }
        assert!(rep.sr.is_finite() && rep.sr >= 0.0);
        assert!(rep.iterations <= s.solver.max_iters);
    }
}

#[test]
fn selecting_every_position_skips_the_selection_phase() {
    let s = small(25);
    let ch = s.channels().unwrap();
    let (st, rep) = solve_perfect(&s.problem(&ch)).unwrap();
    assert!(st.p.iter().all(|&x| x));
    assert!(rep.selection_trace.is_empty());
}

#[test]
fn psm_hits_the_amplitude_bound() {
    for eta in [0.5, 1.5, 3.0] {
        let mut s = small(4);
        s.ris.eta = eta;
        let ch = s.channels().unwrap();
        let (st, _) = solve_perfect(&s.problem(&ch)).unwrap();
        assert!((norm_inf(&st.varpi) - eta).abs() <= 1e-9 * eta, "eta {eta}");
    }
}

#[test]
fn reported_rate_matches_a_direct_evaluation() {
    let s = small(4);
    let ch = s.channels().unwrap();
    let prob = s.problem(&ch);
    let (st, rep) = solve_perfect(&prob).unwrap();
    let (au, ae) = ch.cascade(&st.varpi);
    let mut y_u = C64::new(0.0, 0.0);
    let mut y_e = C64::new(0.0, 0.0);
    for n in 0..ch.n() {
        y_u += (au * ch.bs_ris[n] + ch.h_u[n]) * st.w[n];
        y_e += (ae * ch.bs_ris[n] + ch.h_e[n]) * st.w[n];
    }
    let kappa = interference_power(&ch.f_u, &st.varpi, s.noise.ris, s.noise.bob);
    let varsigma = interference_power(&ch.f_e, &st.varpi, s.noise.ris, s.noise.eve);
    let direct = secrecy_rate(y_u.norm(), y_e.norm(), kappa, varsigma);
    assert!((direct - rep.sr).abs() <= 1e-9 * direct.max(1.0));
}

#[test]
fn more_power_raises_the_rate() {
    let mut prev = f64::NEG_INFINITY;
    for dbm in [10.0, 20.0, 30.0] {
        let mut s = small(4);
        s.solver.p0 = madm::scenario::dbm_to_watts(dbm);
        let ch = s.channels().unwrap();
        let (_, rep) = solve_perfect(&s.problem(&ch)).unwrap();
        assert!(rep.sr > prev, "{dbm} dBm: {} after {prev}", rep.sr);
        prev = rep.sr;
    }
}

#[test]
fn movable_selection_matches_or_beats_side_by_side() {
    for n_a in [2, 4, 9] {
        let s = small(n_a);
        let ch = s.channels().unwrap();
        let prob = s.problem(&ch);
        let (_, ma) = solve_perfect(&prob).unwrap();
        let (_, fpa) = solve_fixed_p(&prob, &place_side_by_side(&s.grid, n_a).unwrap()).unwrap();
        assert!(ma.sr >= fpa.sr - 1e-6, "n_a {n_a}: {} < {}", ma.sr, fpa.sr);
    }
}

#[test]
fn solves_are_deterministic() {
    let s = small(4);
    let ch = s.channels().unwrap();
    let prob = s.problem(&ch);
    let (a, ra) = solve_perfect(&prob).unwrap();
    let (b, rb) = solve_perfect(&prob).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.sr.to_bits(), rb.sr.to_bits());
    assert_eq!(ra.objective_trace, rb.objective_trace);
}

/// Direct links only, with q_u = [1, 1] and q_e = [1, −1] orthogonal. From
/// a uniform start the reweighting is a constant, so the JBV step is the
/// plain least-norm solution w = Σ_k t_k c_k q̄_k/‖q_k‖² and the power
/// budget fixes t_u = ‖q_u‖·√(P₀ − t_e²/‖q_e‖²).
#[test]
fn orthogonal_toy_matches_least_norm_closed_form() {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let ch = ChannelSet {
        g: vec![one; 4],
        bs_ris: vec![zero, zero],
        f_u: vec![one; 4],
        f_e: vec![one; 4],
        h_u: vec![one, one],
        h_e: vec![one, -one],
    };
    let mut s = small(2);
    s.solver.p0 = 1.0;
    let prob = s.problem(&ch);
    let t_e = 0.3;
    let mut st = madm::solver::BeamState::initial(&prob, &[0, 1], t_e);
    let info = madm::perfect::jbv_step(&prob, &[0, 1], &mut st, false).unwrap();

    let (nu, ne): (f64, f64) = (2.0, 2.0);
    let t_u = (nu * (1.0 - t_e * t_e / ne)).sqrt();
    assert!((st.t_u - t_u).abs() <= 1e-12, "{} vs {t_u}", st.t_u);
    assert!((st.t_e - t_e).abs() <= 1e-15);
    let [c_u, c_e] = s.constellation.symbol_pair();
    for (n, x) in st.w.iter().enumerate() {
        let expect = t_u * c_u * ch.h_u[n].conj() / nu + t_e * c_e * ch.h_e[n].conj() / ne;
        assert!((x - expect).norm() <= 1e-12, "w[{n}] = {x} vs {expect}");
    }
    assert!((power(&st.w) - 1.0).abs() <= 1e-12);
    assert!(info.residual <= 1e-12 && !info.rank_deficient);
}
