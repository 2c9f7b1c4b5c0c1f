use std::f64::consts::PI;

use rand::Rng as _;

use super::{rng, Rng, SceneClass, SceneSpec};
use crate::audio_io::{lowpass, AudioClip};
use crate::error::{Error, Result};

/// Output rate of every generated clip.
pub const SYNTH_RATE: u32 = 44_100;

const SPEECH_BAND_HZ: f64 = 3900.0;
const MUSIC_BAND_HZ: f64 = 16_000.0;
const LAPTOP_CUTOFF_HZ: f64 = 8000.0;

const TV_RMS: f64 = 0.16;
const CONVERSATION_RMS: f64 = 0.07;
const LAPTOP_ATTENUATION: f64 = 0.35;
const ROOM_NOISE_CORNER_HZ: f64 = 300.0;

/// Adds `amp * env[t] * sin(phase + 2 pi f t / fs)` starting at `start`,
/// using a rotating phasor.
fn add_partial(buf: &mut [f64], start: usize, env: &[f64], freq: f64, amp: f64, phase: f64) {
    let w = 2.0 * PI * freq / SYNTH_RATE as f64;
    let (ws, wc) = w.sin_cos();
    let (mut s, mut c) = phase.sin_cos();
    let end = (start + env.len()).min(buf.len());
    for (out, e) in buf[start..end].iter_mut().zip(env) {
        *out += amp * e * s;
        (s, c) = (s * wc + c * ws, c * wc - s * ws);
    }
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * (i as f64 + 0.5) / len as f64).cos())
        .collect()
}

fn secs(rng: &mut Rng, lo: f64, hi: f64) -> usize {
    (rng.gen_range(lo..hi) * SYNTH_RATE as f64) as usize
}

fn bump(f: f64, center: f64, width: f64) -> f64 {
    (-((f - center) / width).powi(2)).exp()
}

/// Voiced syllables from one to three speakers separated by pauses.
fn speech(rng: &mut Rng, n: usize) -> Vec<f64> {
    let speakers: Vec<f64> = (0..rng.gen_range(1..=3))
        .map(|_| {
            if rng.gen_bool(0.5) {
                rng.gen_range(90.0..150.0)
            } else {
                rng.gen_range(170.0..260.0)
            }
        })
        .collect();
    let mut buf = vec![0.0; n];
    let mut t = secs(rng, 0.0, 0.3);
    while t < n {
        let len = secs(rng, 0.12, 0.35);
        let f0 = speakers[rng.gen_range(0..speakers.len())] * rng.gen_range(0.85..1.2);
        let f1 = rng.gen_range(300.0..900.0);
        let f2 = rng.gen_range(900.0..2500.0);
        let level = rng.gen_range(0.5..1.0);
        let env = hann(len);
        let mut k = 1;
        while k as f64 * f0 < SPEECH_BAND_HZ {
            let f = k as f64 * f0;
            let amp = level / (k as f64).powf(0.7)
                * (0.3 + 2.0 * bump(f, f1, 150.0) + 1.2 * bump(f, f2, 250.0));
            add_partial(&mut buf, t, &env, f, amp, rng.gen_range(0.0..2.0 * PI));
            k += 1;
        }
        t += len;
        t += if rng.gen_bool(0.15) {
            secs(rng, 0.4, 1.0)
        } else {
            secs(rng, 0.04, 0.25)
        };
    }
    buf
}

/// Chords of bright, sparse partials reaching 16 kHz plus noise hits on a
/// beat grid.
fn music(rng: &mut Rng, n: usize) -> Vec<f64> {
    const PARTIALS: [u32; 16] = [1, 2, 3, 4, 5, 6, 8, 10, 13, 17, 22, 28, 36, 46, 60, 76];
    let mut buf = vec![0.0; n];
    let tilt = rng.gen_range(0.3..0.7);
    let mut t = 0;
    while t < n {
        let len = secs(rng, 0.2, 0.8);
        let env: Vec<f64> = (0..len)
            .map(|i| {
                let attack = (i as f64 / 400.0).min(1.0);
                attack * (-(i as f64) / (0.6 * SYNTH_RATE as f64)).exp()
            })
            .collect();
        for _ in 0..rng.gen_range(2..=4) {
            let f0 = 110.0 * 2f64.powf(rng.gen_range(0..36) as f64 / 12.0);
            for &k in &PARTIALS {
                let f = k as f64 * f0 * rng.gen_range(0.995..1.005);
                if f >= MUSIC_BAND_HZ {
                    break;
                }
                let amp = 1.0 / (k as f64).powf(tilt);
                add_partial(&mut buf, t, &env, f, amp, rng.gen_range(0.0..2.0 * PI));
            }
        }
        t += len;
    }

    let mut hits = vec![0.0; n];
    let beat = secs(rng, 0.43, 0.67) / 2;
    let decay = 0.03 * SYNTH_RATE as f64;
    let mut t = 0;
    while t < n {
        let level = rng.gen_range(0.5..1.0);
        for (i, h) in hits[t..(t + beat).min(n)].iter_mut().enumerate() {
            *h = level * (-(i as f64) / decay).exp() * rng.gen_range(-1.0..1.0);
        }
        t += beat;
    }
    let hits = lowpass(&hits, SYNTH_RATE, MUSIC_BAND_HZ, 63);
    let (m, h) = (rms(&buf), rms(&hits));
    for (b, x) in buf.iter_mut().zip(hits) {
        *b = *b / m.max(1e-12) + 0.4 * x / h.max(1e-12);
    }
    buf
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64).sqrt()
}

fn scale_to(x: &mut [f64], target: f64) {
    let r = rms(x);
    if r > 0.0 {
        x.iter_mut().for_each(|v| *v *= target / r);
    }
}

/// Speech over music; the music share depends on the kind of show.
fn tv_mix(rng: &mut Rng, n: usize) -> Vec<f64> {
    let share = match rng.gen_range(0..3) {
        0 => rng.gen_range(0.25..0.5),
        1 => rng.gen_range(0.6..1.0),
        _ => rng.gen_range(1.0..1.5),
    };
    let mut voice = speech(rng, n);
    let mut tune = music(rng, n);
    scale_to(&mut voice, 1.0);
    scale_to(&mut tune, share);
    let mut mix: Vec<f64> = voice.iter().zip(&tune).map(|(a, b)| a + b).collect();
    scale_to(&mut mix, TV_RMS);
    mix
}

/// Four-pole low-passed background noise with the given RMS.
fn room_noise(rng: &mut Rng, n: usize, level: f64) -> Vec<f64> {
    let a = (-2.0 * PI * ROOM_NOISE_CORNER_HZ / SYNTH_RATE as f64).exp();
    let mut state = [0.0; 4];
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let mut x = rng.gen_range(-1.0..1.0);
            for s in state.iter_mut() {
                *s = a * *s + (1.0 - a) * x;
                x = *s;
            }
            x
        })
        .collect();
    scale_to(&mut out, level);
    out
}

/// Generates a clip of an audio scene class at [`SYNTH_RATE`].
pub fn synth_audio(spec: &SceneSpec) -> Result<AudioClip> {
    spec.validate()?;
    if !spec.class.is_audio() {
        return Err(Error::InvalidConfig(format!(
            "{} is not an audio scene class",
            spec.class
        )));
    }
    if !(spec.duration_seconds > 0.0 && spec.duration_seconds.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "duration {} must be positive",
            spec.duration_seconds
        )));
    }
    let n = ((spec.duration_seconds * SYNTH_RATE as f64).round() as usize).max(1);
    let mut rng = rng(spec.seed);
    let mut samples = match spec.class {
        SceneClass::Tv => tv_mix(&mut rng, n),
        SceneClass::Laptop => {
            let mix = tv_mix(&mut rng, n);
            let mut out = lowpass(&mix, SYNTH_RATE, LAPTOP_CUTOFF_HZ, 101);
            out.iter_mut().for_each(|v| *v *= LAPTOP_ATTENUATION);
            out
        }
        SceneClass::Conversation => {
            let mut s = speech(&mut rng, n);
            scale_to(&mut s, CONVERSATION_RMS);
            s
        }
        _ => vec![0.0; n],
    };
    let floor = room_noise(&mut rng, n, spec.noise_level);
    for (v, f) in samples.iter_mut().zip(floor) {
        *v = *v * spec.gain + f;
    }
    Ok(AudioClip::new(samples, SYNTH_RATE)?.with_label(spec.class.name()))
}
