//! Combinatorics on finite words: least rotations, primitive roots and
//! Lyndon word generation.

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

/// Index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation_index(w: &[Symbol]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    let s = |i: isize| w[i as usize % n];
    let mut f = vec![-1isize; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = s(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != s(k + i + 1) {
            if sj < s(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if sj != s(k + i + 1) {
            if sj < s(k) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    k as usize % n
}

pub fn rotate(w: &[Symbol], by: usize) -> Word {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let by = by % n;
    w[by..].iter().chain(&w[..by]).copied().collect()
}

pub fn least_rotation(w: &[Symbol]) -> Word {
    rotate(w, least_rotation_index(w))
}

/// Length of the smallest `p` with `w = (w[..p])^(n/p)`.
pub fn primitive_period(w: &[Symbol]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    // KMP failure function.
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

pub fn primitive_root(w: &[Symbol]) -> Word {
    w[..primitive_period(w)].to_vec()
}

pub fn is_primitive(w: &[Symbol]) -> bool {
    !w.is_empty() && primitive_period(w) == w.len()
}

/// All Lyndon words over `{0..k-1}` of length `1..=max_len`, in lexicographic
/// order (Duval's generation algorithm).
pub fn lyndon_words(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if k == 0 || max_len == 0 {
        return out;
    }
    let top = (k - 1) as Symbol;
    let mut w: Vec<i32> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        out.push(w.iter().map(|&s| s as Symbol).collect());
        let m = w.len();
        while w.len() < max_len {
            let s = w[w.len() - m];
            w.push(s);
        }
        while let Some(&last) = w.last() {
            if last == top as i32 {
                w.pop();
            } else {
                break;
            }
        }
    }
    out
}

/// Renders a word as a string of digits (alphabets up to 10) or as
/// dot-separated numbers otherwise.
pub fn word_to_string(w: &[Symbol]) -> String {
    if w.iter().all(|&s| s < 10) {
        w.iter().map(|&s| char::from(b'0' + s)).collect()
    } else {
        w.iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

pub fn parse_word(s: &str) -> Option<Word> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if s.contains('.') {
        s.split('.').map(|t| t.parse().ok()).collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as Symbol))
            .collect()
    }
}
