//! Synthetic NSL-KDD-shaped rows for tests that need a file on disk.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SERVICES: [&str; 6] = ["http", "private", "ftp_data", "smtp", "domain_u", "ecr_i"];
const FLAGS: [&str; 4] = ["SF", "S0", "REJ", "RSTO"];

/// `n` comma-separated rows with 41 features, a label and a difficulty
/// column. Attacks are driven by a handful of features (flag, count,
/// serror rates, bytes) with some label noise, so selection and trees have
/// signal to find.
pub fn synthetic_rows(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..n {
        let attack = rng.gen_bool(0.45);
        let kind = rng.gen_range(0..3);
        let mut f: Vec<String> = Vec::with_capacity(43);
        let proto = if attack && kind == 2 { "icmp" } else if rng.gen_bool(0.8) { "tcp" } else { "udp" };
        let service = if attack && kind == 0 {
            "private"
        } else if attack && kind == 2 {
            "ecr_i"
        } else {
            SERVICES[rng.gen_range(0..4)]
        };
        let flag = if attack && kind == 0 { "S0" } else if attack && kind == 1 { FLAGS[rng.gen_range(2..4)] } else { "SF" };
        let src_bytes: u32 = if attack && kind == 2 { rng.gen_range(500..1100) } else if attack { rng.gen_range(0..20) } else { rng.gen_range(100..5000) };
        let count: u32 = if attack { rng.gen_range(100..511) } else { rng.gen_range(1..60) };
        let serror: f64 = if attack && kind == 0 { 1.0 } else { (rng.gen_range(0..10) as f64) / 100.0 };
        let same_srv: f64 = if attack { (rng.gen_range(0..20) as f64) / 100.0 } else { (rng.gen_range(80..101) as f64) / 100.0 };
        let logged_in = if attack { "0" } else if rng.gen_bool(0.7) { "1" } else { "0" };
        for idx in 1..=41 {
            let v = match idx {
                1 => rng.gen_range(0..3).to_string(),
                2 => proto.to_string(),
                3 => service.to_string(),
                4 => flag.to_string(),
                5 => src_bytes.to_string(),
                6 => (if attack { 0 } else { rng.gen_range(0..20000) }).to_string(),
                7 => "0".to_string(),
                12 => logged_in.to_string(),
                21 => "0".to_string(),
                22 => (if rng.gen_bool(0.02) { "1" } else { "0" }).to_string(),
                23 => count.to_string(),
                24 => (count / 2 + rng.gen_range(0..10)).to_string(),
                25 | 26 | 38 | 39 => format!("{serror}"),
                29 => format!("{same_srv}"),
                32 => rng.gen_range(0..256).to_string(),
                33 => (if attack { rng.gen_range(0..30) } else { rng.gen_range(100..256) }).to_string(),
                _ => if rng.gen_bool(0.1) { (rng.gen_range(0..100) as f64 / 100.0).to_string() } else { "0".to_string() },
            };
            f.push(v);
        }
        let flip = rng.gen_bool(0.01);
        let label = match (attack != flip, kind) {
            (false, _) => "normal",
            (true, 0) => "neptune",
            (true, 1) => "portsweep",
            _ => "smurf",
        };
        f.push(label.to_string());
        f.push(rng.gen_range(10..22).to_string());
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}
