use crate::num::Real;

/// Erlang-B blocking probability for `servers` circuits offered `load` Erlang,
/// via B(0) = 1, B(n) = a·B(n-1) / (n + a·B(n-1)).
pub fn erlang_b<R: Real>(servers: usize, load: R) -> R {
    (1..=servers).fold(R::one(), |b, n| {
        let ab = load * b;
        ab / (R::from_count(n) + ab)
    })
}
