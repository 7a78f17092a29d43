//! C ABI over the `squashlogic` core.
//!
//! Every function returns an [`SlStatus`]; results travel through out
//! pointers. On failure a human-readable message is kept per thread and can
//! be copied out with [`sl_last_error_message`]. Networks and datasets are
//! opaque handles owned by the caller and released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use squashlogic::datasets::{gen_circle, gen_gaussian, gen_halfplane_region, gen_spiral_with, LabeledDataset, Provenance, RegionSpec, SpiralSpec};
use squashlogic::gates::{build_gate_network, GateActivation, GateNetworkSpec};
use squashlogic::logic::{self, ClipMode, NamedOperator, SquashingParams};
use squashlogic::nn::{train, ActivationKind, InitScheme, Matrix, Network, TrainConfig};
use squashlogic::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Shape = 4,
    Config = 5,
    Diverged = 6,
    Io = 7,
    Idx = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlOperator {
    Conjunction = 0,
    Disjunction = 1,
    Implication = 2,
    Mean = 3,
    Preference = 4,
    Aggregative = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlActivation {
    Identity = 0,
    Relu = 1,
    Sigmoid = 2,
    Tanh = 3,
    /// Trainable `beta`, `a = 0.5`, `lambda = 1`.
    Squashing = 4,
    /// Fixed `beta`, `a = 0.5`, `lambda = 1`.
    SquashingFixed = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlDatasetKind {
    Gaussian = 0,
    Circle = 1,
    Spiral = 2,
    TwoLine = 3,
    FourLine = 4,
}

/// Opaque trained or untrained network.
pub struct SlNetwork(Network);

/// Opaque labelled dataset.
pub struct SlDataset(LabeledDataset);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::InvalidParameter(_) | Error::EmptyRegion { .. } | Error::ClassTooSmall { .. } => {
            SlStatus::InvalidParameter
        }
        Error::Domain { .. } => SlStatus::Domain,
        Error::Arity { .. } | Error::Shape(_) | Error::LabelOutOfRange { .. } => SlStatus::Shape,
        Error::Config(_) | Error::Json(_) => SlStatus::Config,
        Error::Diverged { .. } => SlStatus::Diverged,
        Error::Io { .. } => SlStatus::Io,
        Error::Idx(_) => SlStatus::Idx,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
    Small { needed: usize, got: usize },
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            SlStatus::NullPointer
        }
        Ok(Err(Fail::Small { needed, got })) => {
            set_error(format!("output buffer holds {got} values, {needed} needed"));
            SlStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            SlStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn input<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: non-null and, per the contract, valid for `len` reads.
    Ok(unsafe { slice::from_raw_parts(p, len) })
}

fn output<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: non-null and, per the contract, valid for `len` writes.
    Ok(unsafe { slice::from_raw_parts_mut(p, len) })
}

fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: handles come from this library and are not yet freed.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn handle_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: as for `handle`, with exclusive access for the call.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn activation(kind: SlActivation, beta0: f64) -> ActivationKind {
    match kind {
        SlActivation::Identity => ActivationKind::Identity,
        SlActivation::Relu => ActivationKind::Relu,
        SlActivation::Sigmoid => ActivationKind::Sigmoid,
        SlActivation::Tanh => ActivationKind::Tanh,
        SlActivation::Squashing => ActivationKind::squashing(beta0, true),
        SlActivation::SquashingFixed => ActivationKind::squashing(beta0, false),
    }
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length in bytes (without the terminator).
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: `buf` is valid for `len > n` bytes.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Generalized cutting function `clamp((x - (a - lambda/2)) / lambda, 0, 1)`.
///
/// # Safety
/// `out_value` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sl_cut(x: f64, a: f64, lambda: f64, out_value: *mut f64) -> SlStatus {
    guard(|| {
        *out(out_value, "out_value")? = logic::cut(x, a, lambda)?;
        Ok(())
    })
}

/// Squashing function and its partial derivatives at `x`. Any of the out
/// pointers may be null to skip that quantity.
///
/// # Safety
/// Non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_squash(
    x: f64,
    a: f64,
    lambda: f64,
    beta: f64,
    out_value: *mut f64,
    out_d_x: *mut f64,
    out_d_beta: *mut f64,
) -> SlStatus {
    guard(|| {
        let p = SquashingParams::new(a, lambda, beta)?;
        let e = logic::squash_eval(x, &p);
        for (dst, v) in [(out_value, e.value), (out_d_x, e.d_x), (out_d_beta, e.d_beta)] {
            // SAFETY: caller contract.
            if let Some(d) = unsafe { dst.as_mut() } {
                *d = v;
            }
        }
        Ok(())
    })
}

/// Two-input nilpotent operator. `beta <= 0` selects the crisp `[.]` clip,
/// otherwise the unit Squashing with that sharpness.
///
/// # Safety
/// `out_value` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sl_operator(op: SlOperator, x: f64, y: f64, beta: f64, out_value: *mut f64) -> SlStatus {
    guard(|| {
        let kind = match op {
            SlOperator::Conjunction => NamedOperator::Conjunction,
            SlOperator::Disjunction => NamedOperator::Disjunction,
            SlOperator::Implication => NamedOperator::Implication,
            SlOperator::Mean => NamedOperator::Mean,
            SlOperator::Preference => NamedOperator::Preference,
            SlOperator::Aggregative => NamedOperator::Aggregative,
        };
        let mode = if beta > 0.0 {
            ClipMode::Soft(SquashingParams::unit(beta)?)
        } else {
            ClipMode::Crisp
        };
        *out(out_value, "out_value")? = logic::named_operator(kind, x, y, mode)?;
        Ok(())
    })
}

/// Multi-layer perceptron over `sizes[0..n_sizes]` with Glorot-uniform
/// weights from `seed`. `beta0` is the initial sharpness of squashing layers.
///
/// # Safety
/// `sizes` must be valid for `n_sizes` reads; `out_net` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_network_mlp(
    sizes: *const usize,
    n_sizes: usize,
    hidden: SlActivation,
    output_activation: SlActivation,
    beta0: f64,
    seed: u64,
    out_net: *mut *mut SlNetwork,
) -> SlStatus {
    guard(|| {
        let slot = out(out_net, "out_net")?;
        let sizes = input(sizes, n_sizes, "sizes")?;
        let (h, o) = (activation(hidden, beta0), activation(output_activation, beta0));
        h.validate()?;
        o.validate()?;
        let net = Network::mlp(sizes, h, o, InitScheme::GlorotUniform, seed)?;
        *slot = Box::into_raw(Box::new(SlNetwork(net)));
        Ok(())
    })
}

/// Two-input network of `k` learned lines feeding a frozen `k`-input AND
/// gate; the single output `o` is read as the class logits `(1 - o, o)`.
///
/// # Safety
/// `out_net` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_gate_network(
    k: usize,
    beta_layer1: f64,
    beta_gate: f64,
    act: SlActivation,
    seed: u64,
    out_net: *mut *mut SlNetwork,
) -> SlStatus {
    guard(|| {
        let slot = out(out_net, "out_net")?;
        let activation = match act {
            SlActivation::Squashing => GateActivation::Squashing,
            SlActivation::Relu => GateActivation::Relu,
            SlActivation::Sigmoid => GateActivation::Sigmoid,
            SlActivation::Tanh => GateActivation::Tanh,
            other => {
                return Err(Error::InvalidParameter(format!("{other:?} is not a gate activation")).into())
            }
        };
        let spec = GateNetworkSpec {
            k,
            beta_layer1,
            beta_gate,
            activation,
        };
        *slot = Box::into_raw(Box::new(SlNetwork(build_gate_network(&spec, seed)?)));
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_network_free(net: *mut SlNetwork) {
    if !net.is_null() {
        // SAFETY: created by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(net) });
    }
}

/// Input width and number of logits.
///
/// # Safety
/// `net` must be a live handle; out pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn sl_network_shape(net: *const SlNetwork, out_inputs: *mut usize, out_logits: *mut usize) -> SlStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        *out(out_inputs, "out_inputs")? = net.input_dim();
        *out(out_logits, "out_logits")? = net.n_outputs();
        Ok(())
    })
}

/// Logits for `rows` row-major samples of `cols` features. `out_logits`
/// receives `rows * n_logits` values.
///
/// # Safety
/// `x` valid for `rows * cols` reads, `out_logits` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn sl_network_predict(
    net: *const SlNetwork,
    x: *const f64,
    rows: usize,
    cols: usize,
    out_logits: *mut f64,
    out_len: usize,
) -> SlStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        let x = Matrix::new(rows, cols, input(x, rows * cols, "x")?.to_vec())?;
        let logits = net.predict(&x)?;
        let needed = logits.as_slice().len();
        if out_len < needed {
            return Err(Fail::Small { needed, got: out_len });
        }
        output(out_logits, needed, "out_logits")?.copy_from_slice(logits.as_slice());
        Ok(())
    })
}

/// Arg-max class of each of `rows` samples.
///
/// # Safety
/// `x` valid for `rows * cols` reads, `out_classes` for `rows` writes.
#[no_mangle]
pub unsafe extern "C" fn sl_network_classify(
    net: *const SlNetwork,
    x: *const f64,
    rows: usize,
    cols: usize,
    out_classes: *mut usize,
) -> SlStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        let x = Matrix::new(rows, cols, input(x, rows * cols, "x")?.to_vec())?;
        let classes = net.classify(&x)?;
        output(out_classes, rows, "out_classes")?.copy_from_slice(&classes);
        Ok(())
    })
}

/// Number of squashing layers, and their current `beta` values copied into
/// `out_betas` when it holds enough room (`out_len`).
///
/// # Safety
/// `out_count` writable; `out_betas` null or valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn sl_network_betas(
    net: *const SlNetwork,
    out_betas: *mut f64,
    out_len: usize,
    out_count: *mut usize,
) -> SlStatus {
    guard(|| {
        let betas = handle(net, "net")?.0.betas();
        *out(out_count, "out_count")? = betas.len();
        if !out_betas.is_null() && out_len > 0 {
            if out_len < betas.len() {
                return Err(Fail::Small {
                    needed: betas.len(),
                    got: out_len,
                });
            }
            output(out_betas, betas.len(), "out_betas")?.copy_from_slice(&betas);
        }
        Ok(())
    })
}

/// Adam on softmax cross-entropy; `batch_size == 0` means full batch.
/// Writes the final training loss and accuracy.
///
/// # Safety
/// Handles live; out pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn sl_network_train(
    net: *mut SlNetwork,
    data: *const SlDataset,
    epochs: usize,
    learning_rate: f64,
    batch_size: usize,
    seed: u64,
    out_loss: *mut f64,
    out_accuracy: *mut f64,
) -> SlStatus {
    guard(|| {
        let net = &mut handle_mut(net, "net")?.0;
        let data = &handle(data, "data")?.0;
        let cfg = TrainConfig {
            epochs,
            learning_rate,
            batch_size,
            seed,
            ..TrainConfig::default()
        };
        let history = train(net, data, None, &cfg, |_| {})?;
        let last = history.last();
        // SAFETY: caller contract.
        if let Some(l) = unsafe { out_loss.as_mut() } {
            *l = last.train_loss;
        }
        // SAFETY: caller contract.
        if let Some(a) = unsafe { out_accuracy.as_mut() } {
            *a = last.train_acc;
        }
        Ok(())
    })
}

/// Dataset from `rows` row-major samples and their labels.
///
/// # Safety
/// `features` valid for `rows * cols` reads, `labels` for `rows`.
#[no_mangle]
pub unsafe extern "C" fn sl_dataset_new(
    features: *const f64,
    labels: *const usize,
    rows: usize,
    cols: usize,
    n_classes: usize,
    out_data: *mut *mut SlDataset,
) -> SlStatus {
    guard(|| {
        let slot = out(out_data, "out_data")?;
        let x = Matrix::new(rows, cols, input(features, rows * cols, "features")?.to_vec())?;
        let y = input(labels, rows, "labels")?.to_vec();
        let provenance = Provenance {
            generator: "ffi".into(),
            seed: None,
            params: serde_json::Value::Null,
        };
        let data = LabeledDataset::new(x, y, n_classes, provenance)?;
        *slot = Box::into_raw(Box::new(SlDataset(data)));
        Ok(())
    })
}

/// Seeded synthetic dataset. `n` is points per class for the Gaussian,
/// circle and spiral sets and the total for the line regions.
///
/// # Safety
/// `out_data` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_dataset_generate(kind: SlDatasetKind, n: usize, seed: u64, out_data: *mut *mut SlDataset) -> SlStatus {
    guard(|| {
        let slot = out(out_data, "out_data")?;
        let data = match kind {
            SlDatasetKind::Gaussian => gen_gaussian(n, seed),
            SlDatasetKind::Circle => gen_circle(n, seed),
            SlDatasetKind::Spiral => gen_spiral_with(&SpiralSpec::default(), n, seed)?,
            SlDatasetKind::TwoLine | SlDatasetKind::FourLine => {
                let r = if kind == SlDatasetKind::TwoLine {
                    RegionSpec::two_line()
                } else {
                    RegionSpec::four_line()
                };
                gen_halfplane_region(&r.lines, n, r.bounds, seed)?
            }
        };
        *slot = Box::into_raw(Box::new(SlDataset(data)));
        Ok(())
    })
}

/// # Safety
/// `data` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_dataset_free(data: *mut SlDataset) {
    if !data.is_null() {
        // SAFETY: created by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(data) });
    }
}

/// Number of samples, features and classes.
///
/// # Safety
/// `data` live; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn sl_dataset_shape(
    data: *const SlDataset,
    out_rows: *mut usize,
    out_cols: *mut usize,
    out_classes: *mut usize,
) -> SlStatus {
    guard(|| {
        let d = &handle(data, "data")?.0;
        *out(out_rows, "out_rows")? = d.len();
        *out(out_cols, "out_cols")? = d.n_features();
        *out(out_classes, "out_classes")? = d.n_classes();
        Ok(())
    })
}

/// Copies features (`rows * cols`, row-major) and labels (`rows`) out.
/// Either pointer may be null.
///
/// # Safety
/// Non-null pointers must be valid for the stated number of writes.
#[no_mangle]
pub unsafe extern "C" fn sl_dataset_copy(data: *const SlDataset, out_features: *mut f64, out_labels: *mut usize) -> SlStatus {
    guard(|| {
        let d = &handle(data, "data")?.0;
        if !out_features.is_null() {
            output(out_features, d.features().as_slice().len(), "out_features")?.copy_from_slice(d.features().as_slice());
        }
        if !out_labels.is_null() {
            output(out_labels, d.len(), "out_labels")?.copy_from_slice(d.labels());
        }
        Ok(())
    })
}
