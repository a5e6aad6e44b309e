use rand::Rng;

/// Fragments that tend to land near grammar boundaries.
const TOKENS: &[&str] = &[
    "model", "var", "cpt", "noise", "mech", "|", ":", "{", "}", "[", "]", "(", ")", ",", ";", "~", "<-", "->", "\"",
    "#", "\n", " ", "0", "1", "0.5", "-1", "1e400", "NaN", "inf", "é", "\\", "\r\n", "A", "Y", "U_A",
];

/// One to four random edits of `text`, kept valid UTF-8.
pub fn mutate<R: Rng>(rng: &mut R, text: &str) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..rng.random_range(1..=4) {
        let len = chars.len();
        let at = rng.random_range(0..=len);
        match rng.random_range(0..7) {
            0 if len > 0 => {
                chars.remove(at.min(len - 1));
            }
            1 => {
                let token = TOKENS[rng.random_range(0..TOKENS.len())];
                chars.splice(at..at, token.chars());
            }
            2 if len > 1 => {
                let (a, b) = (rng.random_range(0..len), rng.random_range(0..len));
                chars.swap(a, b);
            }
            3 => {
                let end = rng.random_range(at..=len.min(at + 40));
                let copy: Vec<char> = chars[at..end].to_vec();
                chars.splice(at..at, copy);
            }
            4 => {
                let end = rng.random_range(at..=len.min(at + 20));
                chars.drain(at..end);
            }
            5 => chars.truncate(at),
            _ => {
                let c = char::from_u32(rng.random_range(0x20..0x7f)).unwrap();
                chars.insert(at, c);
            }
        }
    }
    chars.into_iter().collect()
}

/// Like [`mutate`] but at byte level, so the result may not be UTF-8.
pub fn mutate_bytes<R: Rng>(rng: &mut R, bytes: &[u8]) -> Vec<u8> {
    let mut out = bytes.to_vec();
    for _ in 0..rng.random_range(1..=4) {
        let at = rng.random_range(0..=out.len());
        match rng.random_range(0..3) {
            0 if !out.is_empty() => {
                let i = at.min(out.len() - 1);
                out[i] = rng.random();
            }
            1 => out.insert(at, rng.random()),
            _ => out.truncate(at),
        }
    }
    out
}
