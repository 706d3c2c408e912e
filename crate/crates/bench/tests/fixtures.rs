use bowtie_bench::{lemniscate_figure, lemniscate_state};

#[test]
fn fixtures_match_their_size() {
    let (state, ctl) = lemniscate_state(200);
    assert_eq!(state.arc.len(), 200);
    assert!(ctl.h_max > 0.0 && ctl.max_points >= 200);
    assert_eq!(lemniscate_figure(200).len(), 4 * 200 - 4);
}
