//! Radix-2 FFT and the uniform-lattice DFT evaluator built on it.
//!
//! [`UniformDft`] evaluates `Σ_j f_j exp(s·2πi·y_k·x_j)` for input and output
//! points on arbitrary uniform lattices (chirp-z / Bluestein), so transforms
//! land on the caller's grid instead of the FFT's native frequency lattice.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Unit complex number `exp(2πi·turns)`, with the argument reduced first.
#[inline]
pub(crate) fn cis_turns(turns: f64) -> C64 {
    let t = turns - turns.round();
    let (s, c) = (2.0 * PI * t).sin_cos();
    C64::new(c, s)
}

/// In-place iterative radix-2 FFT for a fixed power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<C64>,
    rev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let twiddles = (0..n / 2).map(|k| cis_turns(-(k as f64) / n as f64)).collect();
        let bits = n.trailing_zeros();
        let rev = (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Self { n, twiddles, rev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = Σ_j x_j e^{-2πi jk/n}`.
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, false);
    }

    /// `x_j = Σ_k X_k e^{+2πi jk/n}` (unnormalized).
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.rev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

/// Centered integer frequency of FFT bin `k` for length `n`: `[-n/2, n/2)`.
#[inline]
pub(crate) fn centered_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// A uniform lattice `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice1 {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Lattice1 {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Self { start, step, len }
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
}

enum Route {
    Direct { fft: Fft, forward: bool },
    Bluestein { fft: Fft, chirp_hat: Vec<C64> },
}

/// Plan for `out_k = Σ_j f_j exp(sign·2πi·y_k·x_j)` between two uniform
/// lattices. Output points outside `[-band, band)` are set to zero when a
/// band limit is given.
pub struct UniformDft {
    n_in: usize,
    n_out: usize,
    pre: Vec<C64>,
    post: Vec<C64>,
    route: Route,
}

impl UniformDft {
    pub fn new(input: Lattice1, output: Lattice1, sign: f64, band: Option<f64>) -> Self {
        let (n, m) = (input.len, output.len);
        let (a, beta) = (output.start, output.step);
        let (b, h) = (input.start, input.step);
        let alpha = beta * h;
        let s = sign.signum();

        let keep = |y: f64| match band {
            None => true,
            Some(w) => {
                let tol = 1e-9 * w.abs().max(1.0);
                y >= -w - tol && y < w - tol
            }
        };

        // exp(s2πi y_k x_j) = exp(s2πi y_k b)·exp(s2πi a j h)·exp(s2πi α k j)
        let direct = n == m && ((alpha * n as f64).abs() - 1.0).abs() < 1e-12;
        if direct {
            let forward = (s * alpha) < 0.0;
            let pre = (0..n).map(|j| cis_turns(s * a * h * j as f64)).collect();
            let post = (0..m)
                .map(|k| {
                    let y = output.point(k);
                    if keep(y) {
                        cis_turns(s * y * b)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            return Self { n_in: n, n_out: m, pre, post, route: Route::Direct { fft: Fft::new(n), forward } };
        }

        // Bluestein: kj = (k² + j² − (k−j)²)/2.
        let half_chirp = |l: f64| -> f64 {
            let l2 = l * l;
            // α l²/2 reduced in two steps to keep the phase accurate
            let whole = (alpha * l2 * 0.5).floor();
            alpha * l2 * 0.5 - whole
        };
        let pre = (0..n)
            .map(|j| {
                let jf = j as f64;
                cis_turns(s * (a * h * jf)) * cis_turns(s * half_chirp(jf))
            })
            .collect();
        let post = (0..m)
            .map(|k| {
                let y = output.point(k);
                if keep(y) {
                    let kf = k as f64;
                    cis_turns(s * y * b) * cis_turns(s * half_chirp(kf))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let p = (n + m - 1).next_power_of_two();
        let fft = Fft::new(p);
        let mut chirp = vec![C64::new(0.0, 0.0); p];
        for l in 0..m {
            chirp[l] = cis_turns(-s * half_chirp(l as f64));
        }
        for l in 1..n {
            chirp[p - l] = cis_turns(-s * half_chirp(l as f64));
        }
        fft.forward(&mut chirp);
        Self { n_in: n, n_out: m, pre, post, route: Route::Bluestein { fft, chirp_hat: chirp } }
    }

    pub fn input_len(&self) -> usize {
        self.n_in
    }

    pub fn output_len(&self) -> usize {
        self.n_out
    }

    /// Applies the plan; `scratch` is resized as needed and may be reused.
    pub fn apply(&self, input: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        debug_assert_eq!(input.len(), self.n_in);
        debug_assert_eq!(out.len(), self.n_out);
        match &self.route {
            Route::Direct { fft, forward } => {
                scratch.clear();
                scratch.extend(input.iter().zip(&self.pre).map(|(f, p)| f * p));
                if *forward {
                    fft.forward(scratch);
                } else {
                    fft.inverse(scratch);
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o = scratch[k] * self.post[k];
                }
            }
            Route::Bluestein { fft, chirp_hat } => {
                let p = fft.len();
                scratch.clear();
                scratch.resize(p, C64::new(0.0, 0.0));
                for (j, (f, pr)) in input.iter().zip(&self.pre).enumerate() {
                    scratch[j] = f * pr;
                }
                fft.forward(scratch);
                for (x, c) in scratch.iter_mut().zip(chirp_hat) {
                    *x *= c;
                }
                fft.inverse(scratch);
                let inv_p = 1.0 / p as f64;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = scratch[k] * self.post[k] * inv_p;
                }
            }
        }
    }

    pub fn apply_vec(&self, input: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n_out];
        let mut scratch = Vec::new();
        self.apply(input, &mut out, &mut scratch);
        out
    }
}

/// Band-limited (trigonometric) interpolation of periodic samples on
/// `source` evaluated at the points of `target`. Targets outside the
/// source period `[start, start + len·step)` evaluate to zero.
pub struct Resampler {
    fft: Fft,
    eval: UniformDft,
    source: Lattice1,
    inside: Vec<bool>,
}

impl Resampler {
    pub fn new(source: Lattice1, target: Lattice1) -> Self {
        let n = source.len;
        let period = n as f64 * source.step;
        // frequencies q/period for q in [-n/2, n/2]; the Nyquist bin is split
        let freqs = Lattice1::new(-((n / 2) as f64) / period, 1.0 / period, n + 1);
        let shifted = Lattice1::new(target.start - source.start, target.step, target.len);
        let eval = UniformDft::new(freqs, shifted, 1.0, None);
        let tol = 1e-9 * source.step.abs();
        let inside = (0..target.len)
            .map(|k| {
                let rel = target.point(k) - source.start;
                rel >= -tol && rel < period - tol
            })
            .collect();
        Self { fft: Fft::new(n), eval, source, inside }
    }

    pub fn apply(&self, input: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        let n = self.source.len;
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        let mut buf = input.to_vec();
        self.fft.forward(&mut buf);
        let inv_n = 1.0 / n as f64;
        for (k, v) in buf.iter().enumerate() {
            let q = centered_index(k, n);
            let slot = (q + (n / 2) as i64) as usize;
            coeffs[slot] = v * inv_n;
        }
        if n > 1 {
            let nyq = coeffs[0] * 0.5;
            coeffs[0] = nyq;
            coeffs[n] = nyq;
        }
        self.eval.apply(&coeffs, out, scratch);
        for (o, &keep) in out.iter_mut().zip(&self.inside) {
            if !keep {
                *o = C64::new(0.0, 0.0);
            }
        }
    }
}

/// Circular band-limited shift `f(t) ↦ f(t − shift)` of samples with
/// spacing `step`. Lattice-aligned shifts reproduce an exact cyclic shift.
pub fn shift_samples(fft: &Fft, data: &mut [C64], shift: f64, step: f64) {
    let n = data.len();
    fft.forward(data);
    let period = n as f64 * step;
    for (k, v) in data.iter_mut().enumerate() {
        let q = centered_index(k, n);
        if n > 1 && q == -((n / 2) as i64) {
            let c = (PI * shift / step).cos();
            *v *= c;
        } else {
            *v *= cis_turns(-(q as f64) * shift / period);
        }
    }
    fft.inverse(data);
    let inv = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= inv;
    }
}

/// Spectral derivative of the given order along one fiber (spacing `step`).
/// Odd orders zero the Nyquist bin.
pub fn spectral_derivative(fft: &Fft, data: &mut [C64], order: u32, step: f64) {
    if order == 0 {
        return;
    }
    let n = data.len();
    fft.forward(data);
    let period = n as f64 * step;
    for (k, v) in data.iter_mut().enumerate() {
        let q = centered_index(k, n);
        if order % 2 == 1 && n > 1 && q == -((n / 2) as i64) {
            *v = C64::new(0.0, 0.0);
            continue;
        }
        let factor = C64::new(0.0, 2.0 * PI * q as f64 / period).powu(order);
        *v *= factor;
    }
    fft.inverse(data);
    let inv = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= inv;
    }
}
