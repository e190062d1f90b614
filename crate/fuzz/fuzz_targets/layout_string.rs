#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::swcodec::PortionLayout;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = text.parse::<PortionLayout>() {
        let back: PortionLayout = l.to_string().parse().expect("display re-parses");
        assert_eq!(
            (back.k, back.m_vx, back.m_cx, back.m_cy, back.m_vy),
            (l.k, l.m_vx, l.m_cx, l.m_cy, l.m_vy)
        );
    }
});
