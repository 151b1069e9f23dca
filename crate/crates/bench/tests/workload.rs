use kedge_bench::workload;

#[test]
fn workloads_are_reproducible_and_in_general_position() {
    let a = workload(25, 7);
    assert_eq!(a.points(), workload(25, 7).points());
    assert!(a.is_general_position());
    assert_eq!(a.len(), 25);
}
