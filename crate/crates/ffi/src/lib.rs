//! C interface to the `uavplan` planner.
//!
//! Scenarios and planned flights are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every function returns a
//! [`UavStatus`]; on failure a description is available from
//! [`uav_last_error`] until the next call on the same thread. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use uavplan::benchmarks::AreaOfInterest;
use uavplan::estimation::EstimationParams;
use uavplan::harness::{fly, generate_scenario, Algorithm, Flight, ScenarioTemplate};
use uavplan::io::ScenarioDoc;
use uavplan::{Error, Point2D, Scenario, SensorNode};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidScenario = 3,
    Infeasible = 4,
    NoDataCollected = 5,
    TooManyNodes = 6,
    Parse = 7,
    BufferTooSmall = 8,
    Internal = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UavAlgorithm {
    Greedy = 0,
    Strip = 1,
    Zigzag = 2,
    Exact = 3,
}

fn algorithm_from_raw(raw: i32) -> Result<Algorithm, Failure> {
    Ok(match raw {
        x if x == UavAlgorithm::Greedy as i32 => Algorithm::Greedy,
        x if x == UavAlgorithm::Strip as i32 => Algorithm::Strip,
        x if x == UavAlgorithm::Zigzag as i32 => Algorithm::Zigzag,
        x if x == UavAlgorithm::Exact as i32 => Algorithm::Exact,
        _ => return Err(Failure(UavStatus::InvalidArgument, format!("unknown algorithm {raw}"))),
    })
}

/// A validated scenario plus the area used by the sweep baselines.
pub struct UavScenario {
    doc: ScenarioDoc,
}

/// A planned and evaluated flight.
pub struct UavFlight {
    flight: Flight,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> UavStatus {
    match err {
        Error::InvalidScenario(_) | Error::InvalidTrajectory(_) | Error::InvalidPlan(_) => UavStatus::InvalidScenario,
        Error::InfeasiblePlan { .. } => UavStatus::Infeasible,
        Error::NoDataCollected => UavStatus::NoDataCollected,
        Error::TooManyNodes { .. } => UavStatus::TooManyNodes,
        Error::Json(_) | Error::Csv(_) => UavStatus::Parse,
        Error::UnknownSite(_) | Error::DuplicateSite(_) | Error::InvalidSweep(_) => UavStatus::InvalidArgument,
        Error::Io(_) => UavStatus::Internal,
    }
}

struct Failure(UavStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(UavStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UavStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UavStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            UavStatus::Internal
        }
    }
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn uav_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn uav_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a scenario from node arrays of length `n`; node ids are 1..=n.
/// Estimation parameters default to sigma2 = 1, W = 1, S = 10.
///
/// # Safety
/// `xs`, `ys` and `radii` must point to `n` readable values (or `n == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_new(
    n: usize,
    xs: *const f64,
    ys: *const f64,
    radii: *const f64,
    start_x: f64,
    start_y: f64,
    end_x: f64,
    end_y: f64,
    v_max: f64,
    horizon: f64,
    out: *mut *mut UavScenario,
) -> UavStatus {
    guard(|| {
        let (xs, ys, radii) = (slice(xs, n, "xs")?, slice(ys, n, "ys")?, slice(radii, n, "radii")?);
        let nodes = (0..n)
            .map(|i| SensorNode::new(i + 1, Point2D::new(xs[i], ys[i]), radii[i]))
            .collect();
        let scenario = Scenario::new(
            nodes,
            Point2D::new(start_x, start_y),
            Point2D::new(end_x, end_y),
            v_max,
            horizon,
        )?;
        let handle = Box::new(UavScenario {
            doc: ScenarioDoc::new(scenario, None),
        });
        write_out(out, Box::into_raw(handle), "out")
    })
}

/// Random scenario with `n` nodes in a `width` x `height` area centered on
/// the origin, flying corner to corner.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_generate(
    seed: u64,
    n: usize,
    width: f64,
    height: f64,
    radius: f64,
    v_max: f64,
    horizon: f64,
    out: *mut *mut UavScenario,
) -> UavStatus {
    guard(|| {
        let area = AreaOfInterest::centered(width, height)?;
        let template = ScenarioTemplate {
            n,
            area,
            radius,
            start: area.min,
            end: area.max,
            v_max,
            horizon,
            ..ScenarioTemplate::default()
        };
        let scenario = generate_scenario(seed, &template)?;
        let handle = Box::new(UavScenario {
            doc: ScenarioDoc::new(scenario, Some(area)),
        });
        write_out(out, Box::into_raw(handle), "out")
    })
}

/// Parses a scenario JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_from_json(json: *const c_char, out: *mut *mut UavScenario) -> UavStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(UavStatus::Parse, format!("json is not utf-8: {e}")))?;
        let doc = ScenarioDoc::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(UavScenario { doc })), "out")
    })
}

/// Serializes a scenario; free the result with [`uav_string_free`].
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_to_json(scenario: *const UavScenario, out: *mut *mut c_char) -> UavStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let json = s.doc.to_json()?;
        let c = CString::new(json).map_err(|e| Failure(UavStatus::Internal, e.to_string()))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// Number of sensor nodes, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_node_count(scenario: *const UavScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.doc.scenario.len())
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uav_scenario_free(scenario: *mut UavScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Plans and evaluates a flight. `algorithm` is a [`UavAlgorithm`] value.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_plan(scenario: *const UavScenario, algorithm: i32, out: *mut *mut UavFlight) -> UavStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let flight = fly(
            algorithm_from_raw(algorithm)?,
            &s.doc.scenario,
            &s.doc.area_or_enclosing(),
        )?;
        write_out(out, Box::into_raw(Box::new(UavFlight { flight })), "out")
    })
}

/// Number of nodes whose data is collected (K).
///
/// # Safety
/// `flight` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_visited_count(flight: *const UavFlight) -> usize {
    flight.as_ref().map_or(0, |f| f.flight.k())
}

/// Path length in meters, or NaN for a null handle.
///
/// # Safety
/// `flight` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_length(flight: *const UavFlight) -> f64 {
    flight.as_ref().map_or(f64::NAN, |f| f.flight.path_length)
}

/// Copies the visited node ids in visiting order (greedy and exact) or in
/// id order (sweeps). `written` receives the required length; fails with
/// `BufferTooSmall` if `capacity` is less.
///
/// # Safety
/// `flight` must be a live handle; `ids` must have room for `capacity`
/// values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_order(
    flight: *const UavFlight,
    ids: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> UavStatus {
    guard(|| {
        let f = flight.as_ref().ok_or_else(|| null("flight"))?;
        let order = match &f.flight.plan {
            Some(plan) => plan.order.clone(),
            None => f.flight.report.visited_ids(),
        };
        write_out(written, order.len(), "written")?;
        if order.len() > capacity {
            return Err(Failure(
                UavStatus::BufferTooSmall,
                format!("need {} ids, capacity {capacity}", order.len()),
            ));
        }
        if !order.is_empty() {
            if ids.is_null() {
                return Err(null("ids"));
            }
            ptr::copy_nonoverlapping(order.as_ptr(), ids, order.len());
        }
        Ok(())
    })
}

/// Number of trajectory vertices.
///
/// # Safety
/// `flight` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_vertex_count(flight: *const UavFlight) -> usize {
    flight.as_ref().map_or(0, |f| f.flight.trajectory.vertices.len())
}

/// Copies trajectory vertices as `[t, x, y]` triples into `txy`, which must
/// hold `3 * capacity` doubles.
///
/// # Safety
/// `flight` must be a live handle; `txy` must have room for `3 * capacity`
/// values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_vertices(
    flight: *const UavFlight,
    txy: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> UavStatus {
    guard(|| {
        let f = flight.as_ref().ok_or_else(|| null("flight"))?;
        let vertices = &f.flight.trajectory.vertices;
        write_out(written, vertices.len(), "written")?;
        if vertices.len() > capacity {
            return Err(Failure(
                UavStatus::BufferTooSmall,
                format!("need {} vertices, capacity {capacity}", vertices.len()),
            ));
        }
        if txy.is_null() {
            return Err(null("txy"));
        }
        let flat: Vec<f64> = vertices
            .iter()
            .flat_map(|v| [v.time, v.position.x, v.position.y])
            .collect();
        ptr::copy_nonoverlapping(flat.as_ptr(), txy, flat.len());
        Ok(())
    })
}

/// # Safety
/// `flight` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn uav_flight_free(flight: *mut UavFlight) {
    if !flight.is_null() {
        drop(Box::from_raw(flight));
    }
}

/// Estimation MSE after collecting `k` readings. `k == 0` gives
/// `NoDataCollected`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uav_mse(sigma2: f64, half_range: f64, bits: u32, k: usize, out: *mut f64) -> UavStatus {
    guard(|| {
        let params = EstimationParams::new(sigma2, half_range, bits)?;
        write_out(out, uavplan::mse(&params, k)?, "out")
    })
}
