#![no_main]
use libfuzzer_sys::fuzz_target;
use swleak::bits::BitWord;
use swleak::probcore::JointPmf;
use swleak::swcodec::{CodewordBundle, Decoder, LinearEncoder, PortionLayout};

// Bytes: K, four widths, encoder seed, then four codeword values.
fuzz_target!(|data: &[u8]| {
    if data.len() < 14 {
        return;
    }
    let k = 2 + usize::from(data[0] % 5);
    let w: Vec<usize> = data[1..5].iter().map(|b| usize::from(*b) % (k + 1)).collect();
    let Ok(layout) = PortionLayout::explicit(k, w[0], w[1], w[2], w[3]) else {
        return;
    };
    let Ok(enc) = LinearEncoder::new(layout, u64::from(data[5])) else {
        return;
    };
    let pmf = JointPmf::dsbs(0.1).unwrap();
    let dec = Decoder::new(&enc, &pmf).expect("small layouts decode");
    let word = |i: usize, width: usize| {
        let v = u64::from(u16::from_le_bytes([data[6 + 2 * i], data[7 + 2 * i]]));
        // Widths off by one exercise the mismatch path.
        BitWord::truncate(v, (width + usize::from(data[6 + 2 * i] == 0xff)) as u32)
    };
    let bundle = CodewordBundle {
        v_x: word(0, w[0]),
        v_cx: word(1, w[1]),
        v_cy: word(2, w[2]),
        v_y: word(3, w[3]),
    };
    if let Ok(d) = dec.decode(&bundle) {
        assert!(d.posterior >= 0.0 && d.posterior <= 1.0 + 1e-9);
    }
});
