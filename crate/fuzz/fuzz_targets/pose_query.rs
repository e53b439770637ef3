#![no_main]
use comptex_align::service::parse_pose_query;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(query) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((session, pose)) = parse_pose_query(query) {
        assert!(!session.is_empty());
        assert!(pose.tx.is_finite() && pose.ty.is_finite() && pose.theta.is_finite());
        assert!(pose.scale > 0.0 && pose.scale.is_finite());
    }
});
